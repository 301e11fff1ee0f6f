#include "hlyap/cli.hpp"

#include "hlyap/boundary.hpp"
#include "hlyap/certify.hpp"
#include "hlyap/domainbuild.hpp"
#include "hlyap/error.hpp"
#include "hlyap/group.hpp"
#include "hlyap/io.hpp"
#include "hlyap/spectra.hpp"

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <ostream>

namespace hlyap::cli {
namespace {

struct Provenance {
  std::string config_hash;
  std::string group_hash;

  nlohmann::json json() const { return {{"config_hash", config_hash}, {"group_hash", group_hash}}; }
  std::string csv_comment() const { return "# config_hash=" + config_hash + " group_hash=" + group_hash + "\n"; }
};

std::string out_path(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.out_dir.empty() ? default_out_dir() : c.out_dir) / name).string();
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::malformed_input: return kBadInput;
    case ErrorCode::no_proximal_elements: return kEmptySample;
    case ErrorCode::search_exhausted: return kSearchExhausted;
    default: return kFailure;
  }
}

// Runs `body` and maps library errors onto the exit-code contract.
template <class Body>
int guarded(const RunConfig& config, std::ostream& log, Body body) {
  try {
    config.validate();
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kBadInput;
  }
  try {
    return body();
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kFailure;
  }
}

std::string file_label(const std::string& word) {
  std::string out;
  for (char ch : word) {
    out += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  }
  return out;
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
  return {{"command", command},     {"group", group_path},   {"max_len", max_len},
          {"tol", tol},             {"gap_tol", gap_tol},     {"threshold", threshold},
          {"window_min", window_min}, {"window_max", window_max}, {"r2_min", r2_min},
          {"out", out_dir},         {"seed", seed},           {"words", words}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  try {
    RunConfig c;
    c.command = j.value("command", c.command);
    c.group_path = j.value("group", c.group_path);
    c.max_len = j.value("max_len", c.max_len);
    c.tol = j.value("tol", c.tol);
    c.gap_tol = j.value("gap_tol", c.gap_tol);
    c.threshold = j.value("threshold", c.threshold);
    c.window_min = j.value("window_min", c.window_min);
    c.window_max = j.value("window_max", c.window_max);
    c.r2_min = j.value("r2_min", c.r2_min);
    c.out_dir = j.value("out", c.out_dir);
    c.seed = j.value("seed", c.seed);
    c.words = j.value("words", c.words);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::malformed_input, std::string("malformed config: ") + e.what());
  }
}

std::string RunConfig::hash() const {
  auto j = to_json();
  j.erase("out");
  return projlin::fnv1a_hex(j.dump());
}

void RunConfig::validate() const {
  if (max_len < 0) throw Error(ErrorCode::invalid_argument, "max-len must be >= 0");
  if (!(tol > 0) || !(gap_tol > 0) || !(threshold > 0) || !(r2_min > 0)) {
    throw Error(ErrorCode::invalid_argument, "tolerances and thresholds must be positive");
  }
  if (!(window_min > 0) || !(window_max > window_min)) {
    throw Error(ErrorCode::invalid_argument, "window must satisfy 0 < window-min < window-max");
  }
}

std::string default_out_dir() {
  const char* env = std::getenv("HLYAP_OUT");
  return env && *env ? env : "hlyap_out";
}

int cmd_analyze(const RunConfig& config, std::ostream& log) {
  return guarded(config, log, [&] {
    const auto group = projlin::Group::load(config.group_path);
    const Provenance prov{config.hash(), group.hash()};
    const auto report = spectra::simplicity_report(group, config.max_len, config.tol, config.gap_tol);

    io::write_text(out_path(config, "spectrum.csv"), prov.csv_comment() + spectra::spectrum_csv(report.spectra, group));
    io::write_text(out_path(config, "eta_histogram.csv"), prov.csv_comment() + spectra::histogram_csv(report));
    auto all = nlohmann::json::array();
    for (const auto& s : report.spectra) all.push_back(spectra::to_json(s, &group));
    io::write_json(out_path(config, "spectrum.json"), {{"provenance", prov.json()}, {"spectra", all}});
    auto summary = spectra::summary_json(report);
    summary["provenance"] = prov.json();
    summary["config"] = config.to_json();
    io::write_json(out_path(config, "summary.json"), summary);

    log << "words " << report.words << ", biproximal " << report.biproximal << ", loxodromic " << report.loxodromic
        << ", simple fraction " << report.simple_fraction
        << ", loxodromic simple fraction " << report.loxodromic_simple_fraction << ", max |eta| " << report.max_abs_eta;
    if (report.min_gap) log << ", min gap " << *report.min_gap;
    log << (report.max_abs_eta <= config.gap_tol ? " (Riemannian signature)" : " (non-Riemannian signature)") << "\n";
    return kOk;
  });
}

int cmd_certify(const RunConfig& config, std::ostream& log) {
  return guarded(config, log, [&] {
    const auto group = projlin::Group::load(config.group_path);
    const Provenance prov{config.hash(), group.hash()};
    try {
      const Word theta = certify::find_loxodromic(group, config.max_len, config.tol);
      const auto cert = certify::ams_search(group, theta, config.max_len, config.threshold);
      const bool verified = certify::verify_certificate(group, cert);
      auto j = certify::to_json(cert, group);
      j["verified"] = verified;
      j["provenance"] = prov.json();
      io::write_json(out_path(config, "certificate.json"), j);
      log << "theta " << group.format_word(cert.theta) << ", z " << group.format_word(cert.z) << ", min margin "
          << cert.min_margin << (verified ? ", verified" : ", verification FAILED") << "\n";
      return verified ? kOk : kFailure;
    } catch (const certify::SearchExhausted& e) {
      nlohmann::json j{{"error", e.what()},
                       {"best_margin", e.best_margin()},
                       {"words_examined", e.stats().words_examined},
                       {"provenance", prov.json()}};
      if (e.best()) j["best_z"] = group.format_word(*e.best());
      io::write_json(out_path(config, "certificate_failure.json"), j);
      throw;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::search_exhausted) {
        io::write_json(out_path(config, "certificate_failure.json"), {{"error", e.what()}, {"provenance", prov.json()}});
      }
      throw;
    }
  });
}

int cmd_boundary(const RunConfig& config, std::ostream& log) {
  return guarded(config, log, [&] {
    const auto group = projlin::Group::load(config.group_path);
    const Provenance prov{config.hash(), group.hash()};
    std::vector<Word> words;
    for (const auto& w : config.words) {
      if (w != "auto") words.push_back(group.parse_word(w));
    }
    if (words.empty()) words.push_back(certify::find_loxodromic(group, config.max_len, config.tol));

    const auto sample = domainbuild::limit_set_sample(group, config.max_len);
    io::write_text(out_path(config, "limit_set.csv"), prov.csv_comment() + domainbuild::limit_set_csv(sample, group));

    boundary::FitOptions options;
    options.window = {config.window_min, config.window_max};
    options.r2_min = config.r2_min;
    auto summary = nlohmann::json::array();
    bool all_ok = true;
    for (const auto& w : words) {
      const auto g = group.element(w);
      const std::string label = group.format_word(*g.word());
      nlohmann::json entry{{"word", label}};
      try {
        const auto report = boundary::alpha_compare(sample, g, options);
        auto j = boundary::to_json(report, &group);
        j["provenance"] = prov.json();
        io::write_json(out_path(config, "boundary_" + file_label(label) + ".json"), j);
        io::write_text(out_path(config, "boundary_" + file_label(label) + "_samples.csv"),
                       prov.csv_comment() + boundary::samples_csv(report));
        entry["ok"] = report.ok;
        entry["report"] = j;
        all_ok = all_ok && report.ok;
        for (std::size_t i = 0; i < report.fits.size(); ++i) {
          log << label << " direction " << i << ": predicted " << report.alpha_predicted[i];
          if (report.failures[i].empty()) {
            log << ", fitted " << report.fits[i].alpha << " +- " << report.fits[i].alpha_stderr << " (r2 "
                << report.fits[i].r2 << ")\n";
          } else {
            log << ", fit failed: " << report.failures[i] << "\n";
          }
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::malformed_input) throw;
        entry["ok"] = false;
        entry["failure"] = e.what();
        all_ok = false;
        log << label << ": fit failed: " << e.what() << "\n";
      }
      summary.push_back(entry);
    }
    io::write_json(out_path(config, "boundary_summary.json"),
                   {{"provenance", prov.json()}, {"config", config.to_json()}, {"points", summary}});
    return all_ok ? kOk : kFitFailed;
  });
}

int run(const RunConfig& config, std::ostream& log) {
  if (config.command == "analyze") return cmd_analyze(config, log);
  if (config.command == "certify") return cmd_certify(config, log);
  if (config.command == "boundary") return cmd_boundary(config, log);
  log << "error: unknown command '" << config.command << "'\n";
  return kBadInput;
}

}  // namespace hlyap::cli
