// Command-line front-end: fit totally positive Ising and binary models,
// check existence, and certify candidate estimates.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "mtp2/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Maximum likelihood for totally positive binary and Ising models"};
  app.require_subcommand(1);

  mtp2::RunConfig cfg;
  std::string format = "auto";

  const std::map<std::string, mtp2::SampleFormat> format_map{
      {"auto", mtp2::SampleFormat::Auto},
      {"pm1", mtp2::SampleFormat::Pm1},
      {"01", mtp2::SampleFormat::ZeroOne},
      {"counts", mtp2::SampleFormat::Counts}};

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "sample file (CSV rows or counts)")->required();
    sub->add_option("--format", format, "input format: pm1, 01, counts (default: auto)")
        ->check(CLI::IsMember({"auto", "pm1", "01", "counts"}));
    sub->add_option("--dim", cfg.dim_hint, "dimension hint for the counts format");
    sub->add_option("--output", cfg.output, "write the report to this file instead of stdout");
    sub->add_option("--tol-primal", cfg.tols.primal, "certificate tolerance on primal feasibility");
    sub->add_option("--tol-dual", cfg.tols.dual, "certificate tolerance on dual feasibility");
    sub->add_option("--tol-slack", cfg.tols.slack, "certificate tolerance on complementary slackness");
  };

  CLI::App* fit = app.add_subcommand("fit", "fit the sign-constrained Ising MLE on a graph");
  add_common(fit);
  fit->add_option("--graph", cfg.graph, "edge-list file or 'complete'");
  fit->add_option("--epsilon", cfg.epsilon, "moment-matching precision")->check(CLI::PositiveNumber);
  fit->add_option("--max-sweeps", cfg.max_sweeps, "sweep cap")->check(CLI::PositiveNumber);
  fit->add_flag("--symmetric", cfg.symmetric, "fit the palindromic (no external field) family");
  fit->add_flag("--general", cfg.general, "fit over all totally positive distributions instead");

  CLI::App* fitg = app.add_subcommand("fit-general",
                                      "fit the MLE over all totally positive distributions");
  add_common(fitg);

  CLI::App* fits = app.add_subcommand("fit-symmetric", "fit the palindromic Ising MLE on a graph");
  add_common(fits);
  fits->add_option("--graph", cfg.graph, "edge-list file or 'complete'");
  fits->add_option("--epsilon", cfg.epsilon, "moment-matching precision")->check(CLI::PositiveNumber);
  fits->add_option("--max-sweeps", cfg.max_sweeps, "sweep cap")->check(CLI::PositiveNumber);

  CLI::App* chk = app.add_subcommand("check-mtp2", "test the empirical distribution for total positivity");
  add_common(chk);

  CLI::App* exi = app.add_subcommand("check-existence", "test whether a full-support MLE exists");
  add_common(exi);
  exi->add_flag("--symmetric", cfg.symmetric, "use the symmetric-family criterion");

  CLI::App* cert = app.add_subcommand("certify", "verify the optimality certificate of a candidate table");
  add_common(cert);
  cert->add_option("--table", cfg.table, "candidate table, 'mask,value' lines")->required();

  CLI11_PARSE(app, argc, argv);

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.format = format_map.at(format);
  return mtp2::run(cfg, std::cout, std::cerr);
}
