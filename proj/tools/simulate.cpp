#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "operc/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"oriented percolation experiment driver"};
  app.footer("Outputs: CSV tables plus manifest.json in the output directory.");

  std::string experiment, spec_file, out_dir;
  double p = -1.0;
  std::int64_t N = -1, samples = -1, margin = -2;
  std::uint64_t seed = 0;

  app.add_option("experiment", experiment,
                 "theta | alpha_sigma | clt | coalescence | symmdiff | meet | "
                 "branch | crossings | pilot")
      ->required();
  app.add_option("--spec", spec_file, "JSON spec file");
  app.add_option("--p", p, "override: run a single p value");
  app.add_option("--N", N, "override: run a single ladder height");
  app.add_option("--samples", samples, "override: sample count");
  auto* seed_opt = app.add_option("--seed", seed, "override: base seed");
  app.add_option("--margin", margin, "override: margin (-1 selects N/5)");
  app.add_option("--out", out_dir, "override: output directory");
  CLI11_PARSE(app, argc, argv);

  try {
    operc::ExperimentSpec spec;
    if (!spec_file.empty())
      spec = operc::ExperimentSpec::from_json_file(spec_file);
    spec.experiment = experiment;
    if (p >= 0.0) spec.p_values = {p};
    if (N >= 0) spec.n_ladder = {N};
    if (samples >= 0) spec.samples = samples;
    if (seed_opt->count() > 0) spec.base_seed = seed;
    if (margin >= -1) spec.margin = margin;
    if (!out_dir.empty()) spec.out_dir = out_dir;
    return operc::run(spec);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
