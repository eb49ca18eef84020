#ifndef OPERC_EXPERIMENTS_HPP
#define OPERC_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "operc/lattice.hpp"

namespace operc {

inline constexpr const char* kCodeVersion = "0.1.0";

/**
 * Pinned desk-scale study design. The pilot experiment runs exactly this
 * design and freezes its data-dependent outcomes (edge speed, meeting
 * buffer, coalescence height) as fixtures; the regression gate then replays
 * the same design against those fixtures. Keeping the numbers here, in one
 * place, is what makes the two byte-compatible.
 */
namespace study {
inline constexpr double kP = 0.8;
inline constexpr std::uint64_t kBaseSeed = 101;

inline constexpr std::int64_t kThetaN = 4000, kThetaSamples = 300;
inline constexpr std::int64_t kAlphaN = 4000, kAlphaSamples = 300;
inline constexpr std::int64_t kCltLevel = 1000, kCltCap = 4000,
                              kCltSurvivors = 1000;
inline constexpr std::int64_t kMeetN = 1200, kMeetMargin = 240,
                              kMeetSamples = 1500;
inline constexpr std::int64_t kMeetBuffers[] = {0, 60, 120};
inline constexpr std::int64_t kCoalLadder[] = {250, 500, 1000, 2000, 4000};
inline constexpr std::int64_t kCoalSamples = 200;
inline constexpr std::int64_t kStarCandidates[] = {8192, 16384, 24576, 32768};
inline constexpr std::int64_t kStarSamples = 24;
inline constexpr std::int64_t kBranchN1 = 600, kBranchN2 = 1200,
                              kBranchDepth = 600, kBranchSeeds = 40,
                              kBranchCap = 25;
inline constexpr Window kBranchWindow{-40, 40, 0, 40};
// Sized so the two largest rungs sit where late difference activity is
// rare; 12000 -> 16000 growth still adds a third more box height.
inline constexpr std::int64_t kSymmLadder[] = {250,  500,  1000,  2000,
                                               4000, 8000, 12000, 16000};
inline constexpr std::int64_t kSymmSamples = 200;
inline constexpr std::int64_t kCrossLadder[] = {500, 1000, 2000};
inline constexpr std::int64_t kCrossSamples = 400;
inline constexpr std::int64_t kPrefixN1 = 500, kPrefixN2 = 1000,
                              kPrefixSamples = 200;
}  // namespace study

/**
 * Driver parameters, normally read from a JSON spec file. Fields that the
 * selected experiment does not use are ignored. Unset fields keep these
 * defaults.
 */
struct ExperimentSpec {
  std::string experiment;
  std::vector<double> p_values{0.8};
  std::vector<std::int64_t> n_ladder{250, 500, 1000, 2000, 4000};
  std::int64_t samples = 200;
  std::uint64_t base_seed = 101;
  std::int64_t margin = -1;  // -1 selects N / 5 per ladder entry
  std::int64_t clt_level = 1000;
  std::vector<std::int64_t> dx_list{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  Vertex origin1{0, 0};
  Vertex origin2{2, 0};
  double alpha = 0.0;  // crossings experiment; 0 means "estimate it first"
  std::string out_dir = ".";

  // Raises SpecValidationError naming the offending field.
  void validate() const;

  static ExperimentSpec from_json_text(const std::string& text);
  static ExperimentSpec from_json_file(const std::string& path);
};

/** One estimated quantity with its uncertainty and context. */
struct EstimateReport {
  std::string quantity;
  double p = 0.0;
  std::int64_t n = 0;
  std::int64_t sample_size = 0;  // observations the estimate rests on
  double estimate = 0.0;
  double se = 0.0;
  std::map<std::string, double> diagnostics;

  // ContractError when the named diagnostic is absent.
  double diagnostic(const std::string& name) const;
};

// Deterministic stream splitting: one base seed fans out into independent
// environment seeds per (experiment label, sample index).
std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                          std::int64_t index);

// Fraction of environments where the origin reaches relative height N.
EstimateReport estimate_theta(double p, std::int64_t N, std::int64_t samples,
                              std::uint64_t base_seed);

/**
 * Pooled break-point estimates over surviving environments: estimate is
 * alpha = (sum X) / (sum tau), and the report carries the dispersion
 * sigma2 = mean((X E[tau] - tau E[X])^2) plus both normalizations of it
 * that calibrate the edge-speed CLT (over E[tau]^3, and the equivalent
 * mean((X - alpha tau)^2) / E[tau]). SEs bootstrap over environments.
 */
EstimateReport estimate_alpha_sigma(double p, std::int64_t N,
                                    std::int64_t samples,
                                    std::uint64_t base_seed,
                                    std::int64_t margin = -1);

/**
 * Rightmost-path end column gamma(level) over surviving environments,
 * standardized by its own sample mean and deviation; estimate is the
 * Kolmogorov-Smirnov distance to the standard normal. Scans at most
 * `samples` environments, stopping once `max_survivors` survivors have been
 * collected (-1: use every survivor). A degenerate sample (zero deviation)
 * sets the diagnostic degenerate_variance=1 and reports no distance.
 */
EstimateReport clt_diagnostic(double p, std::int64_t level,
                              std::int64_t samples, std::uint64_t base_seed,
                              std::int64_t max_survivors = -1);

/** One (dx, N) cell of a coalescence table; dx = -1 marks pooled rows. */
struct CoalescenceCell {
  double p = 0.0;
  std::int64_t dx = 0;
  std::int64_t n = 0;
  std::int64_t pairs = 0;  // certified pairs (both origins reach the horizon)
  std::int64_t met = 0;    // rightmost paths met at least margin below it
  double fraction = 0.0;
  double se = 0.0;

  bool operator==(const CoalescenceCell&) const = default;
};

struct CoalescenceTable {
  std::vector<CoalescenceCell> cells;   // dx-major, ladder order within dx
  std::vector<CoalescenceCell> pooled;  // one per ladder entry, dx = -1
};

/**
 * Meeting fractions of rightmost-path pairs started at (0,0) and (dx,0),
 * sharing one environment and one sweep per (environment, N). Per-cell SEs
 * are binomial; pooled SEs are computed across environments, since pairs
 * within one environment are dependent.
 */
CoalescenceTable coalescence_curve(double p,
                                   const std::vector<std::int64_t>& dx_list,
                                   const std::vector<std::int64_t>& n_ladder,
                                   std::int64_t samples,
                                   std::uint64_t base_seed,
                                   std::int64_t margin = -1,
                                   std::string_view seed_label = "coal");

struct SymmDiffResult {
  double p = 0.0;
  Vertex u1, u2;
  std::vector<std::int64_t> n_ladder;
  std::int64_t samples = 0;
  std::int64_t certified = 0;       // both origins reach the top of the ladder
  std::vector<double> mean_size;    // per ladder entry, certified mean
  std::vector<std::int64_t> max_size;
  std::int64_t stabilized = 0;      // sizes at the two largest N agree exactly
  double fraction = 0.0;            // stabilized / certified
  double se = 0.0;
};

/**
 * Size of (C_u1 XOR C_u2) clipped below each ladder height, computed once
 * per environment at the top height and read off cumulatively. The clipping
 * window is wide enough that only the height ever truncates.
 */
SymmDiffResult symm_diff_stabilization(double p, Vertex u1, Vertex u2,
                                       const std::vector<std::int64_t>& n_ladder,
                                       std::int64_t samples,
                                       std::uint64_t base_seed);

/** Raw outcome of one walk/path meeting comparison under one environment. */
struct MeetOutcome {
  std::int64_t horizon = 0;  // shared absolute horizon
  bool both_reach = false;
  std::optional<std::int64_t> path_level;  // level of the first shared path
                                           // vertex, when one is certified
  bool walks_met = false;
};

/**
 * One comparison per sample: origins (0,0) and (dx,0) with dx cycling
 * through dx_list, fresh environment each sample, embedded walks versus
 * rightmost paths against the same horizon and margin.
 */
std::vector<MeetOutcome> meet_scan(double p,
                                   const std::vector<std::int64_t>& dx_list,
                                   std::int64_t N, std::int64_t samples,
                                   std::uint64_t base_seed,
                                   std::int64_t margin);

struct MeetAgreement {
  std::int64_t attempts = 0;
  std::int64_t certified = 0;
  std::int64_t agree = 0;
  std::int64_t walk_only = 0;  // walks met, certified paths did not
  std::int64_t path_only = 0;  // paths met below the buffer, walks did not
  std::int64_t buffer = 0;
};

/**
 * Classifies scan outcomes. A comparison is certified when both origins
 * reach the horizon and the path decision is clear of the buffer zone:
 * either no shared vertex at all within the margin, or one at least
 * margin + buffer levels below the horizon. Meetings decided inside the
 * buffer are too close to the horizon to compare against the walks.
 */
MeetAgreement classify_meets(const std::vector<MeetOutcome>& outcomes,
                             std::int64_t margin, std::int64_t buffer);

struct BranchStability {
  std::int64_t seeds = 0;
  std::int64_t sampled = 0;  // doubly certified, branch untruncated twice
  std::int64_t stable = 0;   // branch member set identical at both horizons
  double fraction = 0.0;
  double se = 0.0;
};

/**
 * Compares branch(u) between forests built over the same window against
 * horizons n1 < n2, for members u that also percolate backward to `depth`
 * levels below the window floor (checked in one time-reversed sweep). Takes
 * at most per_seed_cap members per environment, evenly spaced.
 */
BranchStability branch_stability(double p, const Window& window,
                                 std::int64_t n1, std::int64_t n2,
                                 std::int64_t depth, std::int64_t samples,
                                 std::uint64_t base_seed,
                                 std::int64_t per_seed_cap);

struct CrossingSummary {
  double p = 0.0;
  double alpha = 0.0;
  std::vector<std::int64_t> n_ladder;
  std::int64_t survivors = 0;          // environments reaching the top height
  std::vector<double> median_crossings;  // per ladder entry, over survivors
};

/**
 * Median number of times the rightmost path from the origin crosses the ray
 * x = alpha t, per ladder height, conditioned on reaching the top height.
 */
CrossingSummary crossing_medians(double p, double alpha,
                                 const std::vector<std::int64_t>& n_ladder,
                                 std::int64_t samples,
                                 std::uint64_t base_seed);

/**
 * Runs the named experiment and writes its CSV tables plus manifest.json
 * into spec.out_dir. Known names: theta, alpha_sigma, clt, coalescence,
 * symmdiff, meet, branch, crossings, pilot. Nothing is written when the run
 * throws. Returns 0.
 */
int run(const ExperimentSpec& spec);

}  // namespace operc

#endif  // OPERC_EXPERIMENTS_HPP
