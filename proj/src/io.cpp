#include "mtp2/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mtp2/general_mle.hpp"
#include "mtp2/ips.hpp"

namespace mtp2 {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == ';') {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool parse_long(const std::string& s, long long& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc{} && p == e;
}

bool parse_real(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc{} && p == e;
}

}  // namespace

SampleCounts parse_sample_text(const std::string& text, SampleFormat format, int dim_hint) {
  std::vector<std::vector<long long>> rows;
  bool first_content_line = true;
  for (const std::string& raw : split_lines(text)) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split_fields(line);
    std::vector<long long> row;
    bool numeric = true;
    for (const std::string& f : fields) {
      long long v;
      if (!parse_long(f, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first_content_line) {  // optional header
        first_content_line = false;
        continue;
      }
      throw std::runtime_error("malformed sample row: " + line);
    }
    first_content_line = false;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("no observations in sample input");

  if (format == SampleFormat::Counts) {
    int d = dim_hint;
    if (d == 0) {
      state_t maxmask = 0;
      for (const auto& row : rows) {
        if (row.size() != 2) throw std::runtime_error("counts format expects \"mask,count\" lines");
        if (row[0] < 0) throw std::runtime_error("negative state mask");
        maxmask = std::max(maxmask, static_cast<state_t>(row[0]));
      }
      d = 1;
      while ((state_t{1} << d) <= maxmask) ++d;
    }
    std::vector<std::uint64_t> counts(state_count(d), 0);
    for (const auto& row : rows) {
      if (row.size() != 2) throw std::runtime_error("counts format expects \"mask,count\" lines");
      if (row[0] < 0 || static_cast<std::uint64_t>(row[0]) >= counts.size())
        throw std::runtime_error("state mask out of range for dimension");
      if (row[1] < 0) throw std::runtime_error("negative count");
      counts[static_cast<state_t>(row[0])] += static_cast<std::uint64_t>(row[1]);
    }
    return SampleCounts(d, std::move(counts));
  }

  const std::size_t width = rows.front().size();
  bool saw_minus = false, saw_zero = false;
  for (const auto& row : rows) {
    if (row.size() != width) throw std::runtime_error("ragged sample rows");
    for (long long v : row) {
      if (v == -1) saw_minus = true;
      else if (v == 0) saw_zero = true;
      else if (v != 1) throw std::runtime_error("sample value outside {-1,0,1}: " + std::to_string(v));
    }
  }
  SampleFormat eff = format;
  if (eff == SampleFormat::Auto) {
    if (saw_minus && saw_zero) throw std::runtime_error("mixed alphabets: sample contains both -1 and 0");
    eff = saw_zero ? SampleFormat::ZeroOne : SampleFormat::Pm1;
  }
  if (eff == SampleFormat::Pm1 && saw_zero) throw std::runtime_error("value 0 in a -1/+1 sample");
  if (eff == SampleFormat::ZeroOne && saw_minus) throw std::runtime_error("value -1 in a 0/1 sample");

  const int d = static_cast<int>(width);
  std::vector<state_t> states;
  states.reserve(rows.size());
  for (const auto& row : rows) {
    state_t s = 0;
    for (int i = 0; i < d; ++i)
      if (row[i] == 1) s |= state_t{1} << i;
    states.push_back(s);
  }
  return SampleCounts::from_observations(d, states);
}

SampleCounts parse_sample(const std::string& path, SampleFormat format, int dim_hint) {
  return parse_sample_text(read_file(path), format, dim_hint);
}

Graph parse_graph_text(const std::string& text, int d, std::vector<std::string>* warnings) {
  const std::string whole = trim(text);
  if (whole == "complete") return Graph::complete(d);
  std::vector<Graph::Edge> edges;
  std::vector<std::pair<int, int>> seen;
  for (const std::string& raw : split_lines(text)) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line == "complete") return Graph::complete(d);
    const std::vector<std::string> fields = split_fields(line);
    long long a, b;
    if (fields.size() != 2 || !parse_long(fields[0], a) || !parse_long(fields[1], b))
      throw std::runtime_error("malformed graph line: " + line);
    if (a < 1 || a > d || b < 1 || b > d)
      throw std::runtime_error("graph vertex out of range 1.." + std::to_string(d) + ": " + line);
    if (a == b) throw std::runtime_error("self-loop in graph: " + line);
    const std::pair<int, int> e{static_cast<int>(std::min(a, b)) - 1,
                                static_cast<int>(std::max(a, b)) - 1};
    if (std::find(seen.begin(), seen.end(), e) != seen.end()) {
      if (warnings)
        warnings->push_back("duplicate edge " + std::to_string(e.first + 1) + " " +
                            std::to_string(e.second + 1) + " ignored");
      continue;
    }
    seen.push_back(e);
    edges.push_back(e);
  }
  return Graph(d, std::move(edges));
}

Graph parse_graph(const std::string& path_or_keyword, int d, std::vector<std::string>* warnings) {
  if (trim(path_or_keyword) == "complete") return Graph::complete(d);
  return parse_graph_text(read_file(path_or_keyword), d, warnings);
}

ProbTable parse_table_text(const std::string& text, int dim_hint) {
  std::vector<std::pair<state_t, double>> cells;
  state_t maxmask = 0;
  for (const std::string& raw : split_lines(text)) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split_fields(line);
    long long mask;
    double value;
    if (fields.size() != 2 || !parse_long(fields[0], mask) || !parse_real(fields[1], value))
      throw std::runtime_error("malformed table line: " + line);
    if (mask < 0) throw std::runtime_error("negative state mask");
    cells.push_back({static_cast<state_t>(mask), value});
    maxmask = std::max(maxmask, static_cast<state_t>(mask));
  }
  if (cells.empty()) throw std::runtime_error("empty table input");
  int d = dim_hint;
  if (d == 0) {
    d = 1;
    while ((state_t{1} << d) <= maxmask) ++d;
  }
  std::vector<double> values(state_count(d), 0.0);
  for (auto [mask, value] : cells) {
    if (mask >= values.size()) throw std::runtime_error("state mask out of range for dimension");
    values[mask] = value;
  }
  return ProbTable::from_weights(d, std::move(values));
}

ProbTable parse_table(const std::string& path, int dim_hint) {
  return parse_table_text(read_file(path), dim_hint);
}

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 12);
  return std::string(buf, res.ptr);
}

namespace {

std::string edge_string(const std::vector<Graph::Edge>& edges) {
  std::string s;
  for (auto [i, j] : edges) {
    if (!s.empty()) s += ' ';
    s += std::to_string(i + 1) + "-" + std::to_string(j + 1);
  }
  return s;
}

std::string pair_string(const std::vector<std::pair<int, int>>& pairs) {
  std::string s;
  for (auto [i, j] : pairs) {
    if (!s.empty()) s += ' ';
    s += std::to_string(i + 1) + "-" + std::to_string(j + 1);
  }
  return s;
}

std::string vector_line(const std::vector<double>& v) {
  std::string s;
  for (double x : v) {
    if (!s.empty()) s += ' ';
    s += format_double(x);
  }
  return s;
}

void write_matrix(std::ostream& os, const std::string& key, const Matrix& m) {
  os << key << ":\n";
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

void write_certificate(std::ostream& os, const KktCertificate& cert) {
  os << "cert_primal: " << format_double(cert.primal_residual) << '\n';
  os << "cert_dual: " << format_double(cert.dual_residual) << '\n';
  os << "cert_slackness: " << format_double(cert.slackness_residual) << '\n';
  os << "cert_moment: " << format_double(cert.moment_residual) << '\n';
  os << "certified: " << (cert.pass ? "true" : "false") << '\n';
}

void write_table_block(std::ostream& os, const ProbTable& p) {
  if (p.dim() > 12) return;
  os << "p_table:\n";
  for (state_t s = 0; s < p.size(); ++s) os << s << ',' << format_double(p[s]) << '\n';
}

struct ReportHeader {
  const RunConfig& cfg;
  int d;
  std::uint64_t n;
};

void write_header(std::ostream& os, const ReportHeader& h) {
  os << "command: " << h.cfg.command << '\n';
  os << "input: " << h.cfg.input << '\n';
  os << "d: " << h.d << '\n';
  os << "n: " << h.n << '\n';
}

int run_fit(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
  const SampleCounts counts = parse_sample(cfg.input, cfg.format, cfg.dim_hint);
  std::vector<std::string> warnings;
  if (cfg.graph == "complete") err << "note: using the complete graph\n";
  const Graph g = parse_graph(cfg.graph, counts.dim, &warnings);
  for (const std::string& w : warnings) err << "warning: " << w << '\n';

  const bool symmetric = cfg.symmetric || cfg.command == "fit-symmetric";
  const Moments data = moments_from_counts(counts);
  FitOptions options;
  options.max_sweeps = cfg.max_sweeps;

  FitResult res = symmetric ? fit_symmetric(counts, g, cfg.epsilon, options)
                            : fit(counts, g, cfg.epsilon, options);
  Moments target = data;
  if (symmetric) std::fill(target.mean.begin(), target.mean.end(), 0.0);
  const KktCertificate cert = certify_ising(res, target, g, cfg.tols);

  write_header(os, {cfg, counts.dim, counts.n});
  os << "graph_edges: " << edge_string(g.edges()) << '\n';
  os << "epsilon: " << format_double(cfg.epsilon) << '\n';
  os << "symmetric: " << (symmetric ? "true" : "false") << '\n';
  os << "converged: " << (res.converged ? "true" : "false") << '\n';
  os << "sweeps: " << res.sweeps << '\n';
  os << "loglik: " << format_double(log_likelihood(res.p, counts)) << '\n';
  os << "edges_hat: " << edge_string(res.graph_hat.edges()) << '\n';
  os << "h: " << vector_line(res.params.h) << '\n';
  write_matrix(os, "J", res.params.j);
  os << "mu: " << vector_line(res.mu) << '\n';
  write_matrix(os, "Xi", res.xi);
  Matrix sigma(res.xi.rows(), res.xi.cols());
  for (int i = 0; i < sigma.rows(); ++i)
    for (int j = 0; j < sigma.cols(); ++j) sigma(i, j) = res.xi(i, j) - res.mu[i] * res.mu[j];
  write_matrix(os, "Sigma", sigma);
  write_certificate(os, cert);
  write_table_block(os, res.p);

  if (!res.converged) {
    err << "error: no convergence within " << cfg.max_sweeps << " sweeps\n";
    return kExitNotConverged;
  }
  if (!cert.pass) {
    err << "error: optimality certificate failed\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int run_fit_general(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
  const SampleCounts counts = parse_sample(cfg.input, cfg.format, cfg.dim_hint);
  GeneralOptions options;
  options.cert_tol = cfg.tols;
  const GeneralSolution sol = solve_general(counts, options);

  write_header(os, {cfg, counts.dim, counts.n});
  os << "support_size: " << sol.support.size() << '\n';
  os << "support_full: " << (sol.support.size() == state_count(counts.dim) ? "true" : "false")
     << '\n';
  os << "converged: " << (sol.converged ? "true" : "false") << '\n';
  os << "newton_steps: " << sol.newton_steps << '\n';
  os << "loglik: " << format_double(log_likelihood(sol.p, counts)) << '\n';
  write_certificate(os, sol.certificate);
  write_table_block(os, sol.p);

  if (!sol.converged) {
    err << "error: optimality certificate failed\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int run_check_mtp2(const RunConfig& cfg, std::ostream& os, std::ostream&) {
  const SampleCounts counts = parse_sample(cfg.input, cfg.format, cfg.dim_hint);
  const ProbTable p = counts.empirical();
  const Mtp2Check chk = is_mtp2(p);
  write_header(os, {cfg, counts.dim, counts.n});
  os << "mtp2: " << (chk.ok ? "true" : "false") << '\n';
  os << "violations: " << chk.violations.size() << '\n';
  std::size_t shown = 0;
  for (const Mtp2Violation& v : chk.violations) {
    if (++shown > 20) break;
    os << "violation: x=" << v.x << " y=" << v.y << " meet=" << (v.x & v.y)
       << " join=" << (v.x | v.y) << " deficit=" << format_double(v.deficit) << '\n';
  }
  return kExitOk;
}

int run_check_existence(const RunConfig& cfg, std::ostream& os, std::ostream&) {
  const SampleCounts counts = parse_sample(cfg.input, cfg.format, cfg.dim_hint);
  const ExistenceCheck chk =
      cfg.symmetric ? mle_exists_symmetric(counts) : mle_exists_general(counts);
  write_header(os, {cfg, counts.dim, counts.n});
  os << "symmetric: " << (cfg.symmetric ? "true" : "false") << '\n';
  os << "exists: " << (chk.exists ? "true" : "false") << '\n';
  os << "offending_pairs: " << pair_string(chk.offending_pairs) << '\n';
  return chk.exists ? kExitOk : kExitNoMle;
}

int run_certify(const RunConfig& cfg, std::ostream& os, std::ostream& err) {
  const SampleCounts counts = parse_sample(cfg.input, cfg.format, cfg.dim_hint);
  if (cfg.table.empty()) throw std::runtime_error("certify needs --table with a candidate table");
  const ProbTable p = parse_table(cfg.table, counts.dim);
  const KktCertificate cert = certify_general(p, counts, cfg.tols);
  write_header(os, {cfg, counts.dim, counts.n});
  os << "support_size: " << p.support().size() << '\n';
  os << "support_ok: " << (cert.support_ok ? "true" : "false") << '\n';
  os << "loglik: " << format_double(log_likelihood(p, counts)) << '\n';
  write_certificate(os, cert);
  if (!cert.pass) {
    err << "error: optimality certificate failed\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    std::ostringstream report;
    int code;
    if (cfg.command == "fit" && cfg.general) {
      RunConfig c2 = cfg;
      c2.command = "fit-general";
      return run(c2, out, err);
    } else if (cfg.command == "fit" || cfg.command == "fit-symmetric") {
      code = run_fit(cfg, report, err);
    } else if (cfg.command == "fit-general") {
      code = run_fit_general(cfg, report, err);
    } else if (cfg.command == "check-mtp2") {
      code = run_check_mtp2(cfg, report, err);
    } else if (cfg.command == "check-existence") {
      code = run_check_existence(cfg, report, err);
    } else if (cfg.command == "certify") {
      code = run_certify(cfg, report, err);
    } else {
      err << "error: unknown command: " << cfg.command << '\n';
      return kExitUsage;
    }
    if (!cfg.output.empty()) {
      std::ofstream f(cfg.output, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write output file: " + cfg.output);
      f << report.str();
    } else {
      out << report.str();
    }
    return code;
  } catch (const MleNotExists& ex) {
    err << "error: " << ex.what() << '\n';
    if (!ex.offending_edges.empty()) err << "offending_pairs: " << edge_string(ex.offending_edges) << '\n';
    if (!ex.offending_vertices.empty()) {
      err << "offending_vertices:";
      for (int v : ex.offending_vertices) err << ' ' << (v + 1);
      err << '\n';
    }
    return kExitNoMle;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace mtp2
