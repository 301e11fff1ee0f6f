#include "hlyap/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

void add_common(CLI::App* sub, hlyap::cli::RunConfig& c) {
  sub->add_option("--group", c.group_path, "group JSON file")->required();
  sub->add_option("--max-len", c.max_len, "maximal reduced word length");
  sub->add_option("--tol", c.tol, "relative modulus clustering tolerance");
  sub->add_option("--out", c.out_dir, "output directory (default $HLYAP_OUT or ./hlyap_out)");
  sub->add_option("--seed", c.seed, "seed for sampled sweeps");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hilbert-geometry Lyapunov spectra of convex projective structures"};
  app.require_subcommand(1);
  hlyap::cli::RunConfig config;

  auto* analyze = app.add_subcommand("analyze", "per-word orbit spectra and simplicity summary");
  add_common(analyze, config);
  analyze->add_option("--gap-tol", config.gap_tol, "exponents closer than this count as equal");

  auto* certify = app.add_subcommand("certify", "search for a typicality certificate");
  add_common(certify, config);
  certify->add_option("--threshold", config.threshold, "minimal transversality margin");

  auto* boundary = app.add_subcommand("boundary", "fit boundary exponents at attracting points");
  add_common(boundary, config);
  boundary->add_option("--window-min", config.window_min, "smallest |h| relative to the axis length");
  boundary->add_option("--window-max", config.window_max, "largest |h| relative to the axis length");
  boundary->add_option("--words", config.words, "word labels, or auto for the shortest loxodromic word")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hlyap::cli::kBadInput;
  }
  config.command = app.get_subcommands().front()->get_name();
  if (config.out_dir.empty()) config.out_dir = hlyap::cli::default_out_dir();
  return hlyap::cli::run(config, std::cerr);
}
