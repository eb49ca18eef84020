#include "operc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

#include "operc/env.hpp"
#include "operc/errors.hpp"
#include "operc/genealogy.hpp"
#include "operc/kuczek.hpp"
#include "operc/paths.hpp"
#include "operc/reach.hpp"
#include "operc/stats.hpp"

namespace operc {

namespace {

std::uint64_t dmix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Column of each path vertex, level by level from the origin.
std::vector<std::int64_t> path_columns(const PathRec& path) {
  std::vector<std::int64_t> cols;
  cols.reserve(path.steps.size() + 1);
  std::int64_t c = path.origin.x;
  cols.push_back(c);
  for (Side s : path.steps) {
    c += s == Side::RightUp ? 1 : -1;
    cols.push_back(c);
  }
  return cols;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                          std::int64_t index) {
  std::uint64_t h = dmix(base + 0x9E3779B97F4A7C15ull);
  for (char ch : label)
    h = dmix(h ^ (static_cast<unsigned char>(ch) * 0xFF51AFD7ED558CCDull));
  return dmix(h ^ (static_cast<std::uint64_t>(index) * 0xC2B2AE3D27D4EB4Full));
}

// --- ExperimentSpec -----------------------------------------------------

void ExperimentSpec::validate() const {
  if (experiment.empty())
    throw SpecValidationError("experiment", "no experiment name given");
  if (p_values.empty())
    throw SpecValidationError("p_values", "must not be empty");
  for (double p : p_values)
    if (!(p >= 0.0 && p <= 1.0))
      throw SpecValidationError("p_values", "entries must lie in [0, 1]");
  if (n_ladder.empty())
    throw SpecValidationError("n_ladder", "must not be empty");
  for (std::size_t i = 0; i < n_ladder.size(); ++i) {
    if (n_ladder[i] < 1)
      throw SpecValidationError("n_ladder", "entries must be at least 1");
    if (i > 0 && n_ladder[i] <= n_ladder[i - 1])
      throw SpecValidationError("n_ladder", "must be strictly increasing");
  }
  if (samples < 1)
    throw SpecValidationError("samples", "must be at least 1");
  if (margin < -1)
    throw SpecValidationError("margin", "must be -1 (auto) or nonnegative");
  if (clt_level < 1)
    throw SpecValidationError("clt_level", "must be at least 1");
  if (dx_list.empty())
    throw SpecValidationError("dx_list", "must not be empty");
  for (std::int64_t d : dx_list)
    if (d < 0 || (d & 1) != 0)
      throw SpecValidationError("dx_list",
                                "entries must be even and nonnegative");
  if (!origin1.valid())
    throw SpecValidationError("origin1", "x + t must be even");
  if (!origin2.valid())
    throw SpecValidationError("origin2", "x + t must be even");
  if (!(alpha >= 0.0))
    throw SpecValidationError("alpha", "must be nonnegative");
  if (out_dir.empty())
    throw SpecValidationError("out_dir", "must not be empty");
}

ExperimentSpec ExperimentSpec::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw SpecValidationError("spec", "top level must be a JSON object");

  static const std::set<std::string> known{
      "experiment", "p_values", "n_ladder", "samples", "base_seed",
      "margin",     "clt_level", "dx_list", "origin1", "origin2",
      "alpha",      "out_dir"};
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw SpecValidationError(item.key(), "unknown field");

  ExperimentSpec s;
  auto vertex_of = [](const nlohmann::json& v, const char* field) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() ||
        !v[1].is_number_integer())
      throw SpecValidationError(field, "expected [x, t]");
    return Vertex{v[0].get<std::int64_t>(), v[1].get<std::int64_t>()};
  };
  try {
    if (j.contains("experiment")) s.experiment = j["experiment"];
    if (j.contains("p_values"))
      s.p_values = j["p_values"].get<std::vector<double>>();
    if (j.contains("n_ladder"))
      s.n_ladder = j["n_ladder"].get<std::vector<std::int64_t>>();
    if (j.contains("samples")) s.samples = j["samples"];
    if (j.contains("base_seed")) s.base_seed = j["base_seed"];
    if (j.contains("margin")) s.margin = j["margin"];
    if (j.contains("clt_level")) s.clt_level = j["clt_level"];
    if (j.contains("dx_list"))
      s.dx_list = j["dx_list"].get<std::vector<std::int64_t>>();
    if (j.contains("origin1")) s.origin1 = vertex_of(j["origin1"], "origin1");
    if (j.contains("origin2")) s.origin2 = vertex_of(j["origin2"], "origin2");
    if (j.contains("alpha")) s.alpha = j["alpha"];
    if (j.contains("out_dir")) s.out_dir = j["out_dir"];
  } catch (const SpecValidationError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw SpecValidationError("spec", std::string("bad field type: ") +
                                          e.what());
  }
  return s;
}

ExperimentSpec ExperimentSpec::from_json_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SpecValidationError("spec", "cannot read file " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return from_json_text(buf.str());
}

double EstimateReport::diagnostic(const std::string& name) const {
  auto it = diagnostics.find(name);
  if (it == diagnostics.end())
    throw ContractError("no diagnostic named '" + name + "'");
  return it->second;
}

// --- estimators ---------------------------------------------------------

EstimateReport estimate_theta(double p, std::int64_t N, std::int64_t samples,
                              std::uint64_t base_seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ContractError("p outside [0, 1]");
  if (N < 0) throw ContractError("height must be >= 0");
  if (samples < 1) throw ContractError("need at least one sample");
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    EdgeConfig env(p, derive_seed(base_seed, "theta", i));
    if (percolates_to({0, 0}, N, env)) ++hits;
  }
  const double est = static_cast<double>(hits) / static_cast<double>(samples);
  EstimateReport rep{"theta", p, N, samples, est, binomial_se(est, samples),
                     {}};
  rep.diagnostics["survivors"] = static_cast<double>(hits);
  return rep;
}

EstimateReport estimate_alpha_sigma(double p, std::int64_t N,
                                    std::int64_t samples,
                                    std::uint64_t base_seed,
                                    std::int64_t margin) {
  if (samples < 1) throw ContractError("need at least one sample");
  if (margin < 0) margin = N / 5;

  std::vector<double> xs, taus;           // flat record arrays
  std::vector<std::size_t> group_end;     // one past each group's records
  std::vector<double> gx, gt;             // per-group sums
  std::int64_t survivors = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    EdgeConfig env(p, derive_seed(base_seed, "alpha", i));
    try {
      const BreakPointSeries series = break_points({0, 0}, env, N, margin);
      ++survivors;
      if (series.records().empty()) continue;  // survivor, nothing certified
      double sx = 0.0, st = 0.0;
      for (const BreakRecord& r : series.records()) {
        xs.push_back(static_cast<double>(r.X));
        taus.push_back(static_cast<double>(r.tau));
        sx += static_cast<double>(r.X);
        st += static_cast<double>(r.tau);
      }
      gx.push_back(sx);
      gt.push_back(st);
      group_end.push_back(xs.size());
    } catch (const NoPathError&) {
      // condition on survival: drop the environment
    }
  }
  const std::size_t M = xs.size();
  if (M == 0) throw InsufficientDataError("no completed break records");
  const std::int64_t G = static_cast<std::int64_t>(gx.size());

  double SX = 0.0, ST = 0.0;
  for (double v : gx) SX += v;
  for (double v : gt) ST += v;
  const double alpha = SX / ST;
  const double mean_tau = ST / static_cast<double>(M);
  const double mean_x = SX / static_cast<double>(M);

  double sigma2 = 0.0, renewal = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    const double a = xs[k] * mean_tau - taus[k] * mean_x;
    sigma2 += a * a;
    const double b = xs[k] - alpha * taus[k];
    renewal += b * b;
  }
  sigma2 /= static_cast<double>(M);
  renewal /= static_cast<double>(M);

  const double alpha_se = bootstrap_se(
      G,
      [&](std::span<const std::int64_t> idx) {
        double bx = 0.0, bt = 0.0;
        for (std::int64_t g : idx) {
          bx += gx[static_cast<std::size_t>(g)];
          bt += gt[static_cast<std::size_t>(g)];
        }
        return bx / bt;
      },
      derive_seed(base_seed, "alpha_boot", 0));
  const double sigma2_se = bootstrap_se(
      G,
      [&](std::span<const std::int64_t> idx) {
        double bx = 0.0, bt = 0.0;
        std::size_t bm = 0;
        for (std::int64_t g : idx) {
          bx += gx[static_cast<std::size_t>(g)];
          bt += gt[static_cast<std::size_t>(g)];
          const std::size_t lo =
              g == 0 ? 0 : group_end[static_cast<std::size_t>(g) - 1];
          bm += group_end[static_cast<std::size_t>(g)] - lo;
        }
        const double mt = bt / static_cast<double>(bm);
        const double mx = bx / static_cast<double>(bm);
        double s = 0.0;
        for (std::int64_t g : idx) {
          const std::size_t lo =
              g == 0 ? 0 : group_end[static_cast<std::size_t>(g) - 1];
          for (std::size_t k = lo; k < group_end[static_cast<std::size_t>(g)];
               ++k) {
            const double a = xs[k] * mt - taus[k] * mx;
            s += a * a;
          }
        }
        return s / static_cast<double>(bm);
      },
      derive_seed(base_seed, "sigma_boot", 0));

  EstimateReport rep{"alpha", p, N, static_cast<std::int64_t>(M),
                     alpha, alpha_se, {}};
  rep.diagnostics["records"] = static_cast<double>(M);
  rep.diagnostics["groups"] = static_cast<double>(G);
  rep.diagnostics["survivors"] = static_cast<double>(survivors);
  rep.diagnostics["attempts"] = static_cast<double>(samples);
  rep.diagnostics["mean_tau"] = mean_tau;
  rep.diagnostics["mean_x"] = mean_x;
  rep.diagnostics["sigma2"] = sigma2;
  rep.diagnostics["sigma2_se"] = sigma2_se;
  rep.diagnostics["sigma2_over_tau3"] = sigma2 / (mean_tau * mean_tau * mean_tau);
  rep.diagnostics["sigma2_renewal"] = renewal / mean_tau;
  return rep;
}

EstimateReport clt_diagnostic(double p, std::int64_t level,
                              std::int64_t samples, std::uint64_t base_seed,
                              std::int64_t max_survivors) {
  if (level < 1) throw ContractError("level must be at least 1");
  if (samples < 1) throw ContractError("need at least one sample");
  std::vector<double> gamma;
  std::int64_t attempts = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    if (max_survivors >= 0 &&
        static_cast<std::int64_t>(gamma.size()) >= max_survivors)
      break;
    ++attempts;
    EdgeConfig env(p, derive_seed(base_seed, "clt", i));
    try {
      const PathRec g = rightmost_path({0, 0}, level, env);
      gamma.push_back(static_cast<double>(path_columns(g).back()));
    } catch (const NoPathError&) {
    }
  }
  if (gamma.size() < 2)
    throw InsufficientDataError("fewer than two surviving environments");

  EstimateReport rep{"clt_ks", p, level,
                     static_cast<std::int64_t>(gamma.size()), 0.0, 0.0, {}};
  rep.diagnostics["attempts"] = static_cast<double>(attempts);
  rep.diagnostics["survivors"] = static_cast<double>(gamma.size());
  rep.diagnostics["mean"] = mean(gamma);
  const double sd = sample_sd(gamma);
  rep.diagnostics["sd"] = sd;
  if (sd == 0.0) {
    rep.diagnostics["degenerate_variance"] = 1.0;
    return rep;
  }
  rep.diagnostics["degenerate_variance"] = 0.0;
  rep.estimate = ks_distance_to_standard_normal(gamma);
  return rep;
}

// --- coalescence --------------------------------------------------------

CoalescenceTable coalescence_curve(double p,
                                   const std::vector<std::int64_t>& dx_list,
                                   const std::vector<std::int64_t>& n_ladder,
                                   std::int64_t samples,
                                   std::uint64_t base_seed,
                                   std::int64_t margin,
                                   std::string_view seed_label) {
  if (dx_list.empty() || n_ladder.empty())
    throw ContractError("dx list and ladder must not be empty");
  for (std::int64_t d : dx_list)
    if (d < 0 || (d & 1) != 0)
      throw ContractError("dx entries must be even and nonnegative");
  if (samples < 1) throw ContractError("need at least one sample");

  std::vector<Vertex> origins{{0, 0}};
  for (std::int64_t d : dx_list)
    if (d != 0) origins.push_back({d, 0});
  std::sort(origins.begin(), origins.end(), VertexLevelOrder{});
  origins.erase(std::unique(origins.begin(), origins.end()), origins.end());
  auto origin_index = [&](std::int64_t x) {
    for (std::size_t k = 0; k < origins.size(); ++k)
      if (origins[k].x == x) return k;
    throw ContractError("origin lookup failed");
  };

  const std::size_t D = dx_list.size(), L = n_ladder.size();
  std::vector<std::int64_t> pairs(D * L, 0), met(D * L, 0);
  std::vector<std::int64_t> pool_pairs(L, 0), pool_met(L, 0);
  std::vector<std::vector<double>> pool_fracs(L);

  for (std::int64_t i = 0; i < samples; ++i) {
    EdgeConfig env(p, derive_seed(base_seed, seed_label, i));
    for (std::size_t ni = 0; ni < L; ++ni) {
      const std::int64_t N = n_ladder[ni];
      const std::int64_t cut = N - (margin < 0 ? N / 5 : margin);
      const auto paths = rightmost_paths_to_horizon(origins, N, env);
      std::vector<std::vector<std::int64_t>> cols(origins.size());
      for (std::size_t k = 0; k < origins.size(); ++k)
        if (paths[k]) cols[k] = path_columns(*paths[k]);
      std::int64_t spairs = 0, smet = 0;
      for (std::size_t di = 0; di < D; ++di) {
        const std::int64_t d = dx_list[di];
        bool ok, hit;
        if (d == 0) {
          ok = paths[origin_index(0)].has_value();
          hit = ok && 0 <= cut;
        } else {
          const std::size_t a = origin_index(0), b = origin_index(d);
          ok = paths[a].has_value() && paths[b].has_value();
          hit = false;
          if (ok)
            for (std::int64_t t = 0; t <= cut; ++t)
              if (cols[a][static_cast<std::size_t>(t)] ==
                  cols[b][static_cast<std::size_t>(t)]) {
                hit = true;
                break;
              }
        }
        if (!ok) continue;
        ++pairs[di * L + ni];
        ++spairs;
        if (hit) {
          ++met[di * L + ni];
          ++smet;
        }
      }
      pool_pairs[ni] += spairs;
      pool_met[ni] += smet;
      if (spairs > 0)
        pool_fracs[ni].push_back(static_cast<double>(smet) /
                                 static_cast<double>(spairs));
    }
  }

  CoalescenceTable table;
  for (std::size_t di = 0; di < D; ++di)
    for (std::size_t ni = 0; ni < L; ++ni) {
      CoalescenceCell c;
      c.p = p;
      c.dx = dx_list[di];
      c.n = n_ladder[ni];
      c.pairs = pairs[di * L + ni];
      c.met = met[di * L + ni];
      c.fraction = c.pairs > 0 ? static_cast<double>(c.met) /
                                     static_cast<double>(c.pairs)
                               : 0.0;
      c.se = c.pairs > 0 ? binomial_se(c.fraction, c.pairs) : 0.0;
      table.cells.push_back(c);
    }
  for (std::size_t ni = 0; ni < L; ++ni) {
    CoalescenceCell c;
    c.p = p;
    c.dx = -1;
    c.n = n_ladder[ni];
    c.pairs = pool_pairs[ni];
    c.met = pool_met[ni];
    c.fraction = c.pairs > 0 ? static_cast<double>(c.met) /
                                   static_cast<double>(c.pairs)
                             : 0.0;
    // Pairs under one environment are dependent, so spread is taken across
    // environments, not across pairs.
    c.se = pool_fracs[ni].size() >= 2
               ? sample_sd(pool_fracs[ni]) /
                     std::sqrt(static_cast<double>(pool_fracs[ni].size()))
               : 0.0;
    table.pooled.push_back(c);
  }
  return table;
}

// --- symmetric-difference stabilization ---------------------------------

SymmDiffResult symm_diff_stabilization(double p, Vertex u1, Vertex u2,
                                       const std::vector<std::int64_t>& n_ladder,
                                       std::int64_t samples,
                                       std::uint64_t base_seed) {
  require_valid(u1);
  require_valid(u2);
  if (n_ladder.size() < 2)
    throw ContractError("stabilization needs at least two ladder heights");
  for (std::size_t i = 1; i < n_ladder.size(); ++i)
    if (n_ladder[i] <= n_ladder[i - 1])
      throw ContractError("ladder must be strictly increasing");
  if (n_ladder.front() < 1) throw ContractError("heights must be at least 1");
  if (samples < 1) throw ContractError("need at least one sample");

  const std::int64_t t_lo = std::min(u1.t, u2.t);
  const std::int64_t top = t_lo + n_ladder.back();
  const std::int64_t reach = top - t_lo;
  const Window w{std::min(u1.x, u2.x) - reach, std::max(u1.x, u2.x) + reach,
                 t_lo, top};

  SymmDiffResult res;
  res.p = p;
  res.u1 = u1;
  res.u2 = u2;
  res.n_ladder = n_ladder;
  res.samples = samples;
  res.mean_size.assign(n_ladder.size(), 0.0);
  res.max_size.assign(n_ladder.size(), 0);

  for (std::int64_t i = 0; i < samples; ++i) {
    EdgeConfig env(p, derive_seed(base_seed, "symdiff", i));
    // Same-level origins take the fused sweep; it returns the same level
    // counts and survival verdicts as the composed calls below, one shared
    // row fill per level instead of four full passes.
    std::vector<std::int64_t> counts;
    if (u1.t == u2.t) {
      const SymmDiffCounts sw = symm_diff_level_counts(u1, u2, env, reach);
      if (!sw.alive1 || !sw.alive2) continue;
      counts = sw.level_counts;
    } else {
      if (!percolates_to(u1, top - u1.t, env) ||
          !percolates_to(u2, top - u2.t, env))
        continue;
      const VertexSet diff = symmetric_difference(u1, u2, env, w);
      for (std::int64_t t = t_lo; t <= top; ++t)
        counts.push_back(diff.level_count(t));
    }
    ++res.certified;
    std::vector<std::int64_t> size_at(n_ladder.size(), 0);
    std::int64_t cum = 0;
    std::size_t k = 0;
    for (std::int64_t t = t_lo; t <= top && k < n_ladder.size(); ++t) {
      cum += counts[static_cast<std::size_t>(t - t_lo)];
      while (k < n_ladder.size() && t == t_lo + n_ladder[k]) {
        size_at[k] = cum;
        ++k;
      }
    }
    for (std::size_t m = 0; m < n_ladder.size(); ++m) {
      res.mean_size[m] += static_cast<double>(size_at[m]);
      res.max_size[m] = std::max(res.max_size[m], size_at[m]);
    }
    if (size_at[n_ladder.size() - 1] == size_at[n_ladder.size() - 2])
      ++res.stabilized;
  }
  if (res.certified > 0) {
    for (double& v : res.mean_size) v /= static_cast<double>(res.certified);
    res.fraction = static_cast<double>(res.stabilized) /
                   static_cast<double>(res.certified);
    res.se = binomial_se(res.fraction, res.certified);
  }
  return res;
}

// --- walk/path meeting comparison ---------------------------------------

std::vector<MeetOutcome> meet_scan(double p,
                                   const std::vector<std::int64_t>& dx_list,
                                   std::int64_t N, std::int64_t samples,
                                   std::uint64_t base_seed,
                                   std::int64_t margin) {
  if (dx_list.empty()) throw ContractError("dx list must not be empty");
  if (N < 1 || samples < 1) throw ContractError("bad horizon or sample count");
  if (margin < 0) margin = N / 5;
  std::vector<MeetOutcome> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (std::int64_t i = 0; i < samples; ++i) {
    const std::int64_t d =
        dx_list[static_cast<std::size_t>(i) % dx_list.size()];
    EdgeConfig env(p, derive_seed(base_seed, "meet", i));
    const Vertex u1{0, 0}, u2{d, 0};
    MeetOutcome o;
    o.horizon = N;
    try {
      const auto v = paths_meet(u1, u2, env, N, margin);
      o.both_reach = true;
      if (v) o.path_level = v->t;
      o.walks_met = walks_meet(u1, u2, env, N, margin).has_value();
    } catch (const NoPathError&) {
      o.both_reach = false;
    }
    out.push_back(o);
  }
  return out;
}

MeetAgreement classify_meets(const std::vector<MeetOutcome>& outcomes,
                             std::int64_t margin, std::int64_t buffer) {
  if (margin < 0 || buffer < 0)
    throw ContractError("margin and buffer must be nonnegative");
  MeetAgreement a;
  a.buffer = buffer;
  a.attempts = static_cast<std::int64_t>(outcomes.size());
  for (const MeetOutcome& o : outcomes) {
    if (!o.both_reach) continue;
    if (o.path_level && *o.path_level > o.horizon - margin - buffer)
      continue;  // decided inside the buffer: too close to the horizon
    ++a.certified;
    const bool paths_met = o.path_level.has_value();
    if (paths_met == o.walks_met)
      ++a.agree;
    else if (o.walks_met)
      ++a.walk_only;
    else
      ++a.path_only;
  }
  return a;
}

// --- branch stability -----------------------------------------------------

BranchStability branch_stability(double p, const Window& window,
                                 std::int64_t n1, std::int64_t n2,
                                 std::int64_t depth, std::int64_t samples,
                                 std::uint64_t base_seed,
                                 std::int64_t per_seed_cap) {
  if (window.x_min > window.x_max || window.t_min > window.t_max)
    throw ContractError("window is empty");
  if (n1 < 1 || n2 <= n1) throw ContractError("need horizons 1 <= n1 < n2");
  if (depth < 1) throw ContractError("depth must be at least 1");
  if (samples < 1 || per_seed_cap < 1)
    throw ContractError("need at least one sample and a positive cap");

  // Backward certification band: reversed sites (x, -t) of window members,
  // swept up to the reversed image of the shared floor t_min - depth.
  const std::int64_t rev_lo = -window.t_max;
  const std::int64_t rev_hi = depth - window.t_min;
  const JBand band{(window.x_min - window.t_max) >> 1,
                   ((window.x_max - window.t_min + 1) >> 1) +
                       (rev_hi - rev_lo)};

  BranchStability res;
  for (std::int64_t i = 0; i < samples; ++i) {
    EdgeConfig env(p, derive_seed(base_seed, "branch", i));
    ++res.seeds;
    const Forest f1 = build_forest(window, n1, env, 0);
    const Forest f2 = build_forest(window, n2, env, 0);

    const TimeReversedConfig rev(env);
    const auto back_rows = horizon_reach_rows(rev, band, rev_lo, rev_hi);
    auto back_certified = [&](Vertex v) {
      return back_rows[static_cast<std::size_t>(-v.t - rev_lo)].get(
          to_j({v.x, -v.t}));
    };

    std::vector<Vertex> cand;
    for (Vertex v : f2.vertices())
      if (back_certified(v)) cand.push_back(v);
    if (cand.empty()) continue;
    const std::size_t stride = std::max<std::size_t>(
        1, cand.size() / static_cast<std::size_t>(per_seed_cap));
    std::int64_t taken = 0;
    for (std::size_t k = 0; k < cand.size() && taken < per_seed_cap;
         k += stride) {
      const BranchResult b1 = branch(cand[k], f1);
      const BranchResult b2 = branch(cand[k], f2);
      if (b1.truncated || b2.truncated) continue;
      ++taken;
      ++res.sampled;
      if (b1.members == b2.members) ++res.stable;
    }
  }
  if (res.sampled > 0) {
    res.fraction =
        static_cast<double>(res.stable) / static_cast<double>(res.sampled);
    res.se = binomial_se(res.fraction, res.sampled);
  }
  return res;
}

// --- crossings ------------------------------------------------------------

CrossingSummary crossing_medians(double p, double alpha,
                                 const std::vector<std::int64_t>& n_ladder,
                                 std::int64_t samples,
                                 std::uint64_t base_seed) {
  if (!(alpha > 0.0)) throw ContractError("slope must be positive");
  if (n_ladder.empty()) throw ContractError("ladder must not be empty");
  for (std::size_t i = 1; i < n_ladder.size(); ++i)
    if (n_ladder[i] <= n_ladder[i - 1])
      throw ContractError("ladder must be strictly increasing");
  if (samples < 1) throw ContractError("need at least one sample");

  CrossingSummary res;
  res.p = p;
  res.alpha = alpha;
  res.n_ladder = n_ladder;
  std::vector<std::vector<double>> counts(n_ladder.size());
  for (std::int64_t i = 0; i < samples; ++i) {
    EdgeConfig env(p, derive_seed(base_seed, "cross", i));
    PathRec top;
    try {
      top = rightmost_path({0, 0}, n_ladder.back(), env);
    } catch (const NoPathError&) {
      continue;  // condition every height on reaching the top one
    }
    ++res.survivors;
    for (std::size_t k = 0; k < n_ladder.size(); ++k) {
      const PathRec path = k + 1 == n_ladder.size()
                               ? top
                               : rightmost_path({0, 0}, n_ladder[k], env);
      counts[k].push_back(
          static_cast<double>(crossing_points(path, alpha).size()));
    }
  }
  if (res.survivors == 0)
    throw InsufficientDataError("no environment reached the top height");
  for (auto& c : counts) res.median_crossings.push_back(median(c));
  return res;
}

// --- driver ---------------------------------------------------------------

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

/** Collects artifacts in memory; nothing touches disk until commit(). */
struct ArtifactSet {
  std::string dir;
  std::vector<std::pair<std::string, std::string>> files;

  void add(std::string name, std::string content) {
    files.emplace_back(std::move(name), std::move(content));
  }

  void commit() const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::vector<fs::path> written;
    fs::path tmp;
    try {
      for (const auto& [name, content] : files) {
        const fs::path final_path = fs::path(dir) / name;
        tmp = final_path;
        tmp += ".tmp";
        {
          std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
          os << content;
          if (!os) throw Error("cannot write " + tmp.string());
        }
        fs::rename(tmp, final_path);
        written.push_back(final_path);
      }
    } catch (...) {
      std::error_code drop;
      fs::remove(tmp, drop);
      for (const fs::path& f : written) fs::remove(f, drop);
      throw;
    }
  }
};

std::vector<std::int64_t> vec_of(const std::int64_t* begin,
                                 const std::int64_t* end) {
  return {begin, end};
}

ordered_json report_json(const EstimateReport& r) {
  ordered_json j;
  j["quantity"] = r.quantity;
  j["p"] = r.p;
  j["n"] = r.n;
  j["sample_size"] = r.sample_size;
  j["estimate"] = r.estimate;
  j["se"] = r.se;
  for (const auto& [k, v] : r.diagnostics) j[k] = v;
  return j;
}

std::string coalescence_csv(const std::vector<CoalescenceTable>& tables) {
  std::ostringstream os;
  os << "p,dx,N,pairs,met,fraction,se\n";
  for (const CoalescenceTable& t : tables)
    for (const auto* group : {&t.cells, &t.pooled})
      for (const CoalescenceCell& c : *group)
        os << fmt(c.p) << ',' << c.dx << ',' << c.n << ',' << c.pairs << ','
           << c.met << ',' << fmt(c.fraction) << ',' << fmt(c.se) << '\n';
  return os.str();
}

ordered_json pilot_payload() {
  using namespace study;
  const std::vector<std::int64_t> dx{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  const auto coal_ladder = vec_of(std::begin(kCoalLadder), std::end(kCoalLadder));
  const auto star_cand =
      vec_of(std::begin(kStarCandidates), std::end(kStarCandidates));
  const auto cross_ladder =
      vec_of(std::begin(kCrossLadder), std::end(kCrossLadder));

  ordered_json out;
  out["label"] =
      "self-generated desk-scale targets; no external numeric sources";
  out["code_version"] = kCodeVersion;
  out["p"] = kP;
  out["base_seed"] = kBaseSeed;

  const auto theta = estimate_theta(kP, kThetaN, kThetaSamples, kBaseSeed);
  out["theta"] = report_json(theta);

  const auto alpha = estimate_alpha_sigma(kP, kAlphaN, kAlphaSamples,
                                          kBaseSeed, -1);
  out["alpha"] = report_json(alpha);

  const auto clt =
      clt_diagnostic(kP, kCltLevel, kCltCap, kBaseSeed, kCltSurvivors);
  out["clt"] = report_json(clt);

  {
    const auto outcomes =
        meet_scan(kP, dx, kMeetN, kMeetSamples, kBaseSeed, kMeetMargin);
    ordered_json rows = ordered_json::array();
    std::int64_t picked = -1;
    for (std::int64_t b : kMeetBuffers) {
      const MeetAgreement a = classify_meets(outcomes, kMeetMargin, b);
      rows.push_back({{"buffer", b},
                      {"attempts", a.attempts},
                      {"certified", a.certified},
                      {"agree", a.agree},
                      {"walk_only", a.walk_only},
                      {"path_only", a.path_only}});
      if (picked < 0 && a.certified >= 500 && a.walk_only == 0 &&
          a.path_only == 0)
        picked = b;
    }
    out["meet"] = {{"N", kMeetN},
                   {"margin", kMeetMargin},
                   {"samples", kMeetSamples},
                   {"buffer", picked},
                   {"by_buffer", rows}};
  }

  {
    const auto ladder =
        coalescence_curve(kP, dx, coal_ladder, kCoalSamples, kBaseSeed, -1,
                          "coal");
    const auto star = coalescence_curve(kP, dx, star_cand, kStarSamples,
                                        kBaseSeed, -1, "coalstar");
    ordered_json lj = ordered_json::array();
    for (const CoalescenceCell& c : ladder.pooled)
      lj.push_back({{"N", c.n},
                    {"pairs", c.pairs},
                    {"fraction", c.fraction},
                    {"se", c.se}});
    ordered_json sj = ordered_json::array();
    std::int64_t n_star = -1;
    double n_star_fraction = 0.0;
    for (const CoalescenceCell& c : star.pooled) {
      sj.push_back({{"N", c.n},
                    {"pairs", c.pairs},
                    {"fraction", c.fraction},
                    {"se", c.se}});
      if (n_star < 0 && c.fraction >= 0.96) {
        n_star = c.n;
        n_star_fraction = c.fraction;
      }
    }
    const bool achieved = n_star > 0;
    if (!achieved && !star.pooled.empty()) {
      n_star = star.pooled.back().n;
      n_star_fraction = star.pooled.back().fraction;
    }
    out["coalescence"] = {{"ladder", lj},
                          {"candidates", sj},
                          {"n_star", n_star},
                          {"n_star_fraction", n_star_fraction},
                          {"n_star_achieved", achieved}};
  }

  {
    const auto br = branch_stability(kP, kBranchWindow, kBranchN1, kBranchN2,
                                     kBranchDepth, kBranchSeeds, kBaseSeed,
                                     kBranchCap);
    out["branch"] = {{"n1", kBranchN1},      {"n2", kBranchN2},
                     {"depth", kBranchDepth}, {"seeds", br.seeds},
                     {"sampled", br.sampled}, {"stable", br.stable},
                     {"fraction", br.fraction}, {"se", br.se}};
  }

  {
    const auto symm_ladder =
        vec_of(std::begin(kSymmLadder), std::end(kSymmLadder));
    const auto sd = symm_diff_stabilization(kP, {0, 0}, {2, 0}, symm_ladder,
                                            kSymmSamples, kBaseSeed);
    ordered_json sizes = ordered_json::array();
    for (std::size_t k = 0; k < sd.n_ladder.size(); ++k)
      sizes.push_back({{"N", sd.n_ladder[k]},
                       {"mean_size", sd.mean_size[k]},
                       {"max_size", sd.max_size[k]}});
    out["symmdiff"] = {{"samples", sd.samples},
                       {"certified", sd.certified},
                       {"stabilized", sd.stabilized},
                       {"fraction", sd.fraction},
                       {"se", sd.se},
                       {"sizes", sizes}};
  }

  {
    const auto cr = crossing_medians(kP, alpha.estimate, cross_ladder,
                                     kCrossSamples, kBaseSeed);
    out["crossings"] = {{"alpha", cr.alpha},
                        {"ladder", cr.n_ladder},
                        {"survivors", cr.survivors},
                        {"medians", cr.median_crossings}};
  }

  {
    std::vector<double> prefixes;
    for (std::int64_t i = 0; i < kPrefixSamples; ++i) {
      EdgeConfig env(kP, derive_seed(kBaseSeed, "prefix", i));
      try {
        prefixes.push_back(static_cast<double>(
            stabilization_prefix({0, 0}, env, kPrefixN1, kPrefixN2)));
      } catch (const NoPathError&) {
      }
    }
    out["stabilization_prefix"] = {
        {"n1", kPrefixN1},
        {"n2", kPrefixN2},
        {"attempts", kPrefixSamples},
        {"survivors", prefixes.size()},
        {"median", prefixes.empty() ? -1.0 : median(prefixes)}};
  }
  return out;
}

}  // namespace

int run(const ExperimentSpec& spec) {
  spec.validate();
  static const std::set<std::string> known{
      "theta",    "alpha_sigma", "clt",    "coalescence", "symmdiff",
      "meet",     "branch",      "crossings", "pilot"};
  if (!known.count(spec.experiment))
    throw SpecValidationError("experiment",
                              "unknown experiment '" + spec.experiment + "'");

  ArtifactSet art{spec.out_dir, {}};
  ordered_json extra;  // experiment-specific manifest section

  if (spec.experiment == "theta") {
    std::ostringstream os;
    os << "p,N,samples,theta,se\n";
    for (double p : spec.p_values)
      for (std::int64_t n : spec.n_ladder) {
        const auto r = estimate_theta(p, n, spec.samples, spec.base_seed);
        os << fmt(r.p) << ',' << r.n << ',' << r.sample_size << ','
           << fmt(r.estimate) << ',' << fmt(r.se) << '\n';
      }
    art.add("theta.csv", os.str());
  } else if (spec.experiment == "alpha_sigma") {
    std::ostringstream os;
    os << "p,N,records,survivors,attempts,alpha,alpha_se,sigma2,sigma2_se,"
          "sigma2_over_tau3,sigma2_renewal,mean_tau,mean_x\n";
    for (double p : spec.p_values) {
      const auto r = estimate_alpha_sigma(p, spec.n_ladder.back(),
                                          spec.samples, spec.base_seed,
                                          spec.margin);
      os << fmt(r.p) << ',' << r.n << ',' << r.sample_size << ','
         << fmt(r.diagnostic("survivors")) << ','
         << fmt(r.diagnostic("attempts")) << ',' << fmt(r.estimate) << ','
         << fmt(r.se) << ',' << fmt(r.diagnostic("sigma2")) << ','
         << fmt(r.diagnostic("sigma2_se")) << ','
         << fmt(r.diagnostic("sigma2_over_tau3")) << ','
         << fmt(r.diagnostic("sigma2_renewal")) << ','
         << fmt(r.diagnostic("mean_tau")) << ',' << fmt(r.diagnostic("mean_x"))
         << '\n';
    }
    art.add("alpha_sigma.csv", os.str());
  } else if (spec.experiment == "clt") {
    std::ostringstream os;
    os << "p,level,attempts,survivors,ks,mean,sd,degenerate\n";
    for (double p : spec.p_values) {
      const auto r =
          clt_diagnostic(p, spec.clt_level, spec.samples, spec.base_seed);
      os << fmt(r.p) << ',' << r.n << ',' << fmt(r.diagnostic("attempts"))
         << ',' << fmt(r.diagnostic("survivors")) << ',' << fmt(r.estimate)
         << ',' << fmt(r.diagnostic("mean")) << ',' << fmt(r.diagnostic("sd"))
         << ',' << fmt(r.diagnostic("degenerate_variance")) << '\n';
    }
    art.add("clt.csv", os.str());
  } else if (spec.experiment == "coalescence") {
    std::vector<CoalescenceTable> tables;
    for (double p : spec.p_values)
      tables.push_back(coalescence_curve(p, spec.dx_list, spec.n_ladder,
                                         spec.samples, spec.base_seed,
                                         spec.margin));
    art.add("coalescence.csv", coalescence_csv(tables));
  } else if (spec.experiment == "symmdiff") {
    std::ostringstream os;
    os << "p,x1,t1,x2,t2,N,samples,certified,mean_size,max_size,stabilized,"
          "fraction,se\n";
    for (double p : spec.p_values) {
      const auto r = symm_diff_stabilization(p, spec.origin1, spec.origin2,
                                             spec.n_ladder, spec.samples,
                                             spec.base_seed);
      for (std::size_t k = 0; k < r.n_ladder.size(); ++k)
        os << fmt(r.p) << ',' << r.u1.x << ',' << r.u1.t << ',' << r.u2.x
           << ',' << r.u2.t << ',' << r.n_ladder[k] << ',' << r.samples << ','
           << r.certified << ',' << fmt(r.mean_size[k]) << ','
           << r.max_size[k] << ',' << r.stabilized << ',' << fmt(r.fraction)
           << ',' << fmt(r.se) << '\n';
    }
    art.add("symmdiff.csv", os.str());
  } else if (spec.experiment == "meet") {
    std::ostringstream os;
    os << "p,N,margin,buffer,attempts,certified,agree,walk_only,path_only\n";
    const std::int64_t N = spec.n_ladder.back();
    const std::int64_t margin = spec.margin < 0 ? N / 5 : spec.margin;
    for (double p : spec.p_values) {
      const auto outcomes =
          meet_scan(p, spec.dx_list, N, spec.samples, spec.base_seed, margin);
      for (std::int64_t b : {std::int64_t{0}, N / 20, N / 10}) {
        const auto a = classify_meets(outcomes, margin, b);
        os << fmt(p) << ',' << N << ',' << margin << ',' << b << ','
           << a.attempts << ',' << a.certified << ',' << a.agree << ','
           << a.walk_only << ',' << a.path_only << '\n';
      }
    }
    art.add("meet.csv", os.str());
  } else if (spec.experiment == "branch") {
    if (spec.n_ladder.size() < 2)
      throw SpecValidationError("n_ladder",
                                "branch needs two ladder heights");
    std::ostringstream os;
    os << "p,n1,n2,depth,seeds,sampled,stable,fraction,se\n";
    const std::int64_t n1 = spec.n_ladder[spec.n_ladder.size() - 2];
    const std::int64_t n2 = spec.n_ladder.back();
    for (double p : spec.p_values) {
      const auto r = branch_stability(p, study::kBranchWindow, n1, n2, n1,
                                      spec.samples, spec.base_seed,
                                      study::kBranchCap);
      os << fmt(p) << ',' << n1 << ',' << n2 << ',' << n1 << ',' << r.seeds
         << ',' << r.sampled << ',' << r.stable << ',' << fmt(r.fraction)
         << ',' << fmt(r.se) << '\n';
    }
    art.add("branch.csv", os.str());
  } else if (spec.experiment == "crossings") {
    std::ostringstream os;
    os << "p,alpha,N,survivors,median\n";
    for (double p : spec.p_values) {
      double alpha = spec.alpha;
      if (alpha == 0.0)
        alpha = estimate_alpha_sigma(p, spec.n_ladder.back(), spec.samples,
                                     spec.base_seed, spec.margin)
                    .estimate;
      const auto r = crossing_medians(p, alpha, spec.n_ladder, spec.samples,
                                      spec.base_seed);
      for (std::size_t k = 0; k < r.n_ladder.size(); ++k)
        os << fmt(r.p) << ',' << fmt(r.alpha) << ',' << r.n_ladder[k] << ','
           << r.survivors << ',' << fmt(r.median_crossings[k]) << '\n';
    }
    art.add("crossings.csv", os.str());
  } else {  // pilot
    extra = pilot_payload();
    art.add("pilot.json", extra.dump(2) + "\n");
  }

  ordered_json manifest;
  manifest["experiment"] = spec.experiment;
  manifest["code_version"] = kCodeVersion;
  manifest["targets"] =
      "self-generated desk-scale fixtures; no external numeric sources";
  manifest["p_values"] = spec.p_values;
  manifest["n_ladder"] = spec.n_ladder;
  manifest["samples"] = spec.samples;
  manifest["base_seed"] = spec.base_seed;
  manifest["margin"] = spec.margin;
  manifest["clt_level"] = spec.clt_level;
  manifest["dx_list"] = spec.dx_list;
  manifest["origin1"] = {spec.origin1.x, spec.origin1.t};
  manifest["origin2"] = {spec.origin2.x, spec.origin2.t};
  manifest["alpha"] = spec.alpha;
  ordered_json outputs = ordered_json::array();
  for (const auto& [name, content] : art.files) outputs.push_back(name);
  outputs.push_back("manifest.json");
  manifest["outputs"] = outputs;
  art.add("manifest.json", manifest.dump(2) + "\n");

  art.commit();
  return 0;
}

}  // namespace operc
