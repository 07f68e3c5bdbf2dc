// Copyright 2026 The vormc Authors
// SPDX-License-Identifier: Apache-2.0

// vormc command line: integrate, bench, epsilon, render, mse.
// Machine output is JSON on stdout; diagnostics are JSON lines on stderr.
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vormc/bench.hpp"
#include "vormc/estimators.hpp"
#include "vormc/functions.hpp"
#include "vormc/pointproc.hpp"
#include "vormc/render/render.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalConfig {
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string log_level = "info";
  fs::path output_dir = ".";
  bool pretty = false;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

int level_rank(const std::string& l) {
  static const std::map<std::string, int> ranks{{"error", 0}, {"warn", 1}, {"info", 2}, {"debug", 3}};
  return ranks.at(l);
}

class Log {
 public:
  explicit Log(const GlobalConfig& g) : g_(g) {}
  void operator()(const std::string& level, const std::string& msg, json extra = json::object()) const {
    if (level_rank(level) > level_rank(g_.log_level)) return;
    extra["level"] = level;
    extra["msg"] = msg;
    std::cerr << extra.dump() << '\n';
  }

 private:
  const GlobalConfig& g_;
};

void print(const GlobalConfig& g, const json& j) { std::cout << j.dump(g.pretty ? 2 : -1) << '\n'; }

fs::path under_output_dir(const GlobalConfig& g, const fs::path& p) {
  return p.is_absolute() ? p : g.output_dir / p;
}

void print_table(const vormc::BenchReport& r) {
  std::printf("%-14s %-5s %7s %14s %14s %11s %9s\n", "function", "method", "n", "mean", "std_dev",
              "median_ms", "slope");
  for (const auto& c : r.cells) {
    const auto s = r.slope(c.method);
    std::printf("%-14s %-5s %7llu %14.6g %14.6g %11.4g %9s\n", r.function.c_str(),
                vormc::to_string(c.method), static_cast<unsigned long long>(c.n), c.stats.mean,
                c.stats.std_dev, c.median_time_ms, s ? vormc::format_g6(*s).c_str() : "-");
  }
}

}  // namespace

int main(int argc, char** argv) {
  GlobalConfig g;
  CLI::App app{"Voronoi-weighted Monte Carlo integration toolkit"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
  app.add_option("--log-level", g.log_level, "Diagnostics on stderr")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));
  app.add_option("--output-dir", g.output_dir, "Directory for relative output paths");
  app.add_flag("--pretty", g.pretty, "Indented JSON and human-readable tables");

  // integrate
  std::string method, function, mode = "fixed";
  std::int64_t n = 0;
  std::optional<double> alpha;
  double delta = 1e-3;
  bool timing = false;
  auto* integrate = app.add_subcommand("integrate", "One integral estimate, printed as JSON");
  integrate->add_option("--method", method, "Estimator")
      ->required()
      ->check(CLI::IsMember({"mc", "vor", "fvor", "cvor"}));
  integrate->add_option("--function", function, "holder, not_holder or discontinuity")->required();
  integrate->add_option("--n", n, "Intensity: expected samples per unit area")
      ->required()
      ->check(CLI::PositiveNumber);
  integrate->add_option("--alpha", alpha, "Hoelder exponent for 'holder'");
  integrate->add_option("--delta", delta, "Rejection confidence level for vor/fvor");
  integrate->add_option("--mode", mode, "Point counts")->check(CLI::IsMember({"fixed", "poisson"}));
  integrate->add_flag("--timing", timing, "Include wall time (makes output nondeterministic)");

  // bench
  std::string spec_path;
  fs::path bench_out = "bench";
  std::optional<std::size_t> replications;
  bool full_scale = false;
  auto* bench = app.add_subcommand("bench", "Replicated benchmark from a JSON spec");
  bench->add_option("--spec", spec_path, "Bench spec JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "Report directory (relative to --output-dir)");
  bench->add_option("--replications", replications, "Override the spec's replications");
  bench->add_flag("--full-scale", full_scale,
                  "10000 replications and n from 2^5 to 2^14 (slow)");

  // epsilon
  double eps_n = 0.0, eps_delta = 1e-3;
  auto* epsilon = app.add_subcommand("epsilon", "Stretch margin for intensity n and confidence delta");
  epsilon->add_option("--n", eps_n, "Intensity")->required()->check(CLI::PositiveNumber);
  epsilon->add_option("--delta", eps_delta, "Target rejection probability bound");

  // render
  fs::path scene_path = VORMC_DEFAULT_SCENE;
  int spp = 64, depth = 8;
  std::string sampler = "rnd", weighting = "mc";
  bool nee = true;
  fs::path out;
  std::vector<std::string> dump_pixel;
  std::optional<double> clamp;
  std::string resolution;
  double render_delta = 1e-3;
  auto* render = app.add_subcommand("render", "Path-traced image, linear PFM or gamma-2.2 PPM");
  render->add_option("--scene", scene_path, "Scene JSON")->check(CLI::ExistingFile);
  render->add_option("--spp", spp, "Samples per pixel (intensity per pixel)")->check(CLI::PositiveNumber);
  render->add_option("--sampler", sampler, "Sub-pixel positions")
      ->check(CLI::IsMember({"rnd", "stratified", "sppp"}));
  render->add_option("--weighting", weighting, "Pixel estimator (vor/fvor need sppp)")
      ->check(CLI::IsMember({"mc", "vor", "fvor"}));
  render->add_option("--depth", depth, "Maximum path segments")->check(CLI::PositiveNumber);
  render->add_flag("--nee,!--no-nee", nee, "Next event estimation");
  render->add_option("--out", out, "Output image (.pfm or .ppm)")->required();
  render->add_option("--dump-pixel", dump_pixel, "Dump samples of pixel X,Y to a JSON file")
      ->expected(2)
      ->type_name("X,Y FILE");
  render->add_option("--clamp", clamp, "Firefly cap (default 10x brightest emitter)");
  render->add_option("--resolution", resolution, "Override WIDTHxHEIGHT");
  render->add_option("--delta", render_delta, "Rejection confidence level for sppp");

  // mse
  fs::path mse_a, mse_b;
  auto* mse = app.add_subcommand("mse", "Mean squared error between two PFM images");
  mse->add_option("--a", mse_a, "First image")->required()->check(CLI::ExistingFile);
  mse->add_option("--b", mse_b, "Second image")->required()->check(CLI::ExistingFile);

  if (argc <= 1) {
    std::cout << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "UsageError"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }

  const Log log(g);
  try {
    if (*integrate) {
      const vormc::Integrand f = vormc::make_function(function, alpha);
      const vormc::Method m = vormc::parse_method(method);
      vormc::SpppParams params;
      params.intensity_n = double(n);
      params.confidence_delta = delta;
      params.mode = vormc::parse_count_mode(mode);
      if (m == vormc::Method::vor || m == vormc::Method::fvor)
        params = vormc::SpppParams::for_intensity(double(n), delta, params.mode);
      vormc::Rng rng(g.seed, 0);
      const vormc::EstimateReport rep = vormc::estimate(m, rng, f, params, f.support);
      json j = {{"method", vormc::to_string(rep.method)},
                {"function", f.name},
                {"n", n},
                {"mode", mode},
                {"seed", g.seed},
                {"value", rep.value},
                {"n_interior", rep.n_interior},
                {"n_strip", rep.n_strip},
                {"retries", rep.retries}};
      if (f.exact_value) {
        j["exact_value"] = *f.exact_value;
        j["error"] = rep.value - *f.exact_value;
      }
      if (m == vormc::Method::vor || m == vormc::Method::fvor) {
        j["epsilon"] = params.epsilon;
        j["delta"] = delta;
      }
      if (timing) j["wall_time_ms"] = rep.wall_ms();
      print(g, j);
    } else if (*bench) {
      std::ifstream in(spec_path);
      json sj;
      try {
        in >> sj;
      } catch (const json::exception& e) {
        throw vormc::InvalidArgument("bench spec '" + spec_path + "': " + e.what());
      }
      vormc::BenchSpec spec = vormc::bench_spec_from_json(sj);
      if (!sj.contains("seed")) spec.seed = g.seed;
      if (!sj.contains("threads")) spec.threads = g.threads;
      if (full_scale) {
        spec.replications = 10000;
        spec.n_values.clear();
        for (std::uint64_t k = 5; k <= 14; ++k) spec.n_values.push_back(std::uint64_t(1) << k);
      }
      if (replications) spec.replications = *replications;
      spec.validate();
      log("info", "bench started", {{"function", spec.function.label()},
                                    {"replications", spec.replications}});
      const vormc::BenchReport report = vormc::run_bench(spec);
      const fs::path dir = under_output_dir(g, bench_out);
      vormc::emit_report(report, dir);
      for (const auto& c : report.cells)
        if (c.flagged)
          log("warn", "more than 1% of replications failed",
              {{"method", vormc::to_string(c.method)}, {"n", c.n}, {"failures", c.failures}});
      if (g.pretty) {
        print_table(report);
      } else {
        json j = vormc::report_json(report);
        j["out"] = dir.string();
        print(g, j);
      }
    } else if (*epsilon) {
      const double eps = vormc::solve_epsilon(eps_n, eps_delta);
      print(g, {{"n", eps_n},
                {"delta", eps_delta},
                {"epsilon", eps},
                {"bound", vormc::bound_reject_prob(eps_n, eps)},
                {"strip_count", vormc::strip_count(eps_n, eps)}});
    } else if (*render) {
      vormc::render::Scene scene = vormc::render::load_scene(scene_path);
      if (!resolution.empty()) {
        int w = 0, h = 0;
        if (std::sscanf(resolution.c_str(), "%dx%d", &w, &h) != 2 || w < 1 || h < 1)
          throw UsageError("--resolution expects WIDTHxHEIGHT, got '" + resolution + "'");
        scene.camera.width = w;
        scene.camera.height = h;
      }
      vormc::render::RenderJob job;
      job.scene = &scene;
      job.spp = spp;
      job.sampler = vormc::render::parse_sampler(sampler);
      job.weighting = vormc::render::parse_weighting(weighting);
      job.max_depth = depth;
      job.nee = nee;
      job.seed = g.seed;
      job.delta = render_delta;
      job.clamp = clamp;
      job.threads = g.threads;
      job.validate();
      std::optional<std::array<int, 2>> dump_xy;
      if (!dump_pixel.empty()) {
        int x = -1, y = -1;
        if (std::sscanf(dump_pixel[0].c_str(), "%d,%d", &x, &y) != 2 || x < 0 || y < 0 ||
            x >= scene.camera.width || y >= scene.camera.height)
          throw UsageError("--dump-pixel expects X,Y inside the image, got '" + dump_pixel[0] + "'");
        dump_xy = std::array<int, 2>{x, y};
      }
      log("info", "render started", {{"width", scene.camera.width},
                                     {"height", scene.camera.height},
                                     {"spp", spp}});
      const auto result = vormc::render::render_image(job);
      const fs::path target = under_output_dir(g, out);
      vormc::render::write_image(result.image, target);
      json j = {{"out", target.string()},
                {"width", scene.camera.width},
                {"height", scene.camera.height},
                {"spp", spp},
                {"sampler", sampler},
                {"weighting", weighting},
                {"depth", depth},
                {"nee", nee},
                {"seed", g.seed},
                {"fallbacks", result.fallbacks},
                {"wall_ms", result.wall_ms}};
      if (dump_xy) {
        const auto p = vormc::render::render_pixel(job, (*dump_xy)[0], (*dump_xy)[1], true);
        const fs::path dump_path = under_output_dir(g, dump_pixel[1]);
        vormc::write_text(dump_path,
                          vormc::render::pixel_dump_json(job, (*dump_xy)[0], (*dump_xy)[1], p).dump(2) + "\n");
        j["dump"] = dump_path.string();
      }
      if (result.fallbacks > 0)
        log("warn", "pixels fell back to mean weighting", {{"count", result.fallbacks}});
      print(g, j);
    } else if (*mse) {
      const auto a = vormc::render::read_pfm(mse_a);
      const auto b = vormc::render::read_pfm(mse_b);
      print(g, {{"mse", vormc::render::compute_mse(a, b)}});
    }
  } catch (const UsageError& e) {
    std::cerr << json{{"error", "UsageError"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  } catch (const vormc::Error& e) {
    const bool usage = e.kind() == "InvalidArgument" || e.kind() == "UnknownFunction" ||
                       e.kind() == "InvalidConfidence";
    std::cerr << json{{"error", e.kind()}, {"message", e.what()}}.dump() << '\n';
    return usage ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "RuntimeError"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }
  return 0;
}
