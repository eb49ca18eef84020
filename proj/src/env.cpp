#include "operc/env.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace operc {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kXMul = 0xD6E8FEB86659FD93ull;
constexpr std::uint64_t kTMul = 0x8BB84B93962EACC9ull;
constexpr std::uint64_t kSideSalt = 0x632BE59BD9B4E019ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t bits_for(std::uint64_t h0, std::int64_t x, std::int64_t t,
                              Side side) {
  std::uint64_t a = mix64(h0 ^ (static_cast<std::uint64_t>(x) * kXMul));
  a ^= static_cast<std::uint64_t>(t) * kTMul;
  if (side == Side::RightUp) a ^= kSideSalt;
  return mix64(a);
}

}  // namespace

void Environment::open_row(std::int64_t t, std::int64_t j_lo, std::int64_t j_hi,
                           Side side, std::uint64_t* words) const {
  const std::int64_t n = j_hi - j_lo + 1;
  std::memset(words, 0, static_cast<std::size_t>((n + 63) / 64) * 8);
  const auto b = bounds();
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t j = j_lo + i;
    const EdgeRef e{{2 * j - t, t}, side};
    // Bulk fills treat edges missing from a bounded environment as closed;
    // sweeping bands may legitimately overhang the defined window.
    if (b && !b->contains_edge(e)) continue;
    if (is_open(e)) words[i >> 6] |= 1ull << (i & 63);
  }
}

EdgeConfig::EdgeConfig(double p, std::uint64_t seed) : p_(p), seed_(seed) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ContractError("edge probability must lie in [0,1]");
  h0_ = mix64(seed + kGolden);
  // is_open compares the 53-bit draw against ceil(p * 2^53); the product is
  // exact because multiplying a double by a power of two never rounds.
  threshold_ = static_cast<std::uint64_t>(std::ceil(p * 9007199254740992.0));
}

std::uint64_t EdgeConfig::edge_bits(std::uint64_t seed, const EdgeRef& e) {
  require_valid(e.from);
  return bits_for(mix64(seed + kGolden), e.from.x, e.from.t, e.side);
}

double EdgeConfig::edge_uniform(std::uint64_t seed, const EdgeRef& e) {
  return static_cast<double>(edge_bits(seed, e) >> 11) * 0x1.0p-53;
}

bool EdgeConfig::is_open(const EdgeRef& e) const {
  require_valid(e.from);
  return (bits_for(h0_, e.from.x, e.from.t, e.side) >> 11) < threshold_;
}

void EdgeConfig::open_row(std::int64_t t, std::int64_t j_lo, std::int64_t j_hi,
                          Side side, std::uint64_t* words) const {
  const std::int64_t n = j_hi - j_lo + 1;
  std::memset(words, 0, static_cast<std::size_t>((n + 63) / 64) * 8);
  const std::uint64_t tpart = static_cast<std::uint64_t>(t) * kTMul ^
                              (side == Side::RightUp ? kSideSalt : 0);
  // x = 2j - t advances by 2 per step, so x * kXMul advances by 2 * kXMul.
  std::uint64_t xk = static_cast<std::uint64_t>(2 * j_lo - t) * kXMul;
  for (std::int64_t i = 0; i < n; ++i, xk += 2 * kXMul) {
    const std::uint64_t bits = mix64(mix64(h0_ ^ xk) ^ tpart);
    if ((bits >> 11) < threshold_) words[i >> 6] |= 1ull << (i & 63);
  }
}

// --- ExplicitConfig ---------------------------------------------------

namespace {
constexpr std::int64_t kCoordCap = 1ll << 30;
}

std::uint64_t ExplicitConfig::key(const EdgeRef& e) {
  const std::uint64_t tk = static_cast<std::uint64_t>(e.from.t + kCoordCap);
  const std::uint64_t xk = static_cast<std::uint64_t>(e.from.x + kCoordCap);
  return (tk << 32) | (xk << 1) | (e.side == Side::RightUp ? 1 : 0);
}

ExplicitConfig::ExplicitConfig(const Window& window, double p,
                               std::uint64_t seed, bool all_open)
    : window_(window), p_(p), seed_(seed) {
  if (std::max(std::abs(window.x_min), std::abs(window.x_max)) >= kCoordCap ||
      std::max(std::abs(window.t_min), std::abs(window.t_max)) >= kCoordCap)
    throw ContractError("explicit window coordinates too large");
  if (window.x_min > window.x_max || window.t_min > window.t_max)
    throw ContractError("explicit window is empty");
  for (std::int64_t t = window.t_min; t < window.t_max; ++t) {
    for (std::int64_t x = window.x_min; x <= window.x_max; ++x) {
      if (((x + t) & 1) != 0) continue;
      for (Side s : {Side::LeftUp, Side::RightUp}) {
        EdgeRef e{{x, t}, s};
        if (window.contains(e.target())) flags_.emplace(key(e), all_open);
      }
    }
  }
}

bool ExplicitConfig::has_edge(const EdgeRef& e) const {
  return e.from.valid() && window_.contains_edge(e);
}

bool ExplicitConfig::is_open(const EdgeRef& e) const {
  require_valid(e.from);
  if (!window_.contains_edge(e))
    throw InsufficientWindowError("edge " + to_string(e) +
                                  " outside explicit window");
  return flags_.at(key(e));
}

void ExplicitConfig::set_open(const EdgeRef& e, bool open) {
  require_valid(e.from);
  if (!window_.contains_edge(e))
    throw InsufficientWindowError("edge " + to_string(e) +
                                  " outside explicit window");
  flags_[key(e)] = open;
}

void ExplicitConfig::save(std::ostream& os) const {
  char head[160];
  std::snprintf(head, sizeof head,
                "window %" PRId64 " %" PRId64 " %" PRId64 " %" PRId64
                "; %.17g; %" PRIu64 "\n",
                window_.x_min, window_.x_max, window_.t_min, window_.t_max, p_,
                seed_);
  os << head;
  for (std::int64_t t = window_.t_min; t < window_.t_max; ++t) {
    for (std::int64_t x = window_.x_min; x <= window_.x_max; ++x) {
      if (((x + t) & 1) != 0) continue;
      for (Side s : {Side::LeftUp, Side::RightUp}) {
        EdgeRef e{{x, t}, s};
        if (!window_.contains_edge(e)) continue;
        os << x << ',' << t << ',' << side_char(s) << ','
           << (flags_.at(key(e)) ? '1' : '0') << '\n';
      }
    }
  }
}

ExplicitConfig ExplicitConfig::load(std::istream& is) {
  std::string line;
  long lineno = 1;
  if (!std::getline(is, line)) throw ParseError(1, "missing header");
  Window w;
  double p = 0.0;
  std::uint64_t seed = 0;
  {
    char tag[16] = {0};
    long long xm, xM, tm, tM;
    unsigned long long sd;
    if (std::sscanf(line.c_str(), "%7s %lld %lld %lld %lld ; %lg ; %llu", tag,
                    &xm, &xM, &tm, &tM, &p, &sd) != 7 ||
        std::string(tag) != "window")
      throw ParseError(1, "bad header '" + line + "'");
    w = {xm, xM, tm, tM};
    seed = sd;
  }
  ExplicitConfig cfg(w, p, seed);
  std::size_t assigned = 0;
  std::unordered_map<std::uint64_t, bool> got;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c3 = line.rfind(',');
    if (c3 == std::string::npos || c3 + 2 != line.size())
      throw ParseError(lineno, "expected 'x,t,L|R,0|1', got '" + line + "'");
    const char flag = line[c3 + 1];
    if (flag != '0' && flag != '1')
      throw ParseError(lineno, "flag must be 0 or 1 in '" + line + "'");
    EdgeRef e = parse_edge(line.substr(0, c3), lineno);
    if (!cfg.has_edge(e))
      throw ParseError(lineno, "edge '" + line + "' not inside window");
    if (!got.emplace(key(e), true).second)
      throw ParseError(lineno, "duplicate edge '" + line + "'");
    cfg.set_open(e, flag == '1');
    ++assigned;
  }
  if (assigned != cfg.edge_count())
    throw ParseError(lineno,
                     "expected " + std::to_string(cfg.edge_count()) +
                         " edges, got " + std::to_string(assigned));
  return cfg;
}

ExplicitConfig snapshot(const Environment& env, const Window& window, double p,
                        std::uint64_t seed) {
  if (const auto* hashed = dynamic_cast<const EdgeConfig*>(&env)) {
    if (p == 0.0 && seed == 0) {
      p = hashed->p();
      seed = hashed->seed();
    }
  }
  ExplicitConfig cfg(window, p, seed);
  for (std::int64_t t = window.t_min; t < window.t_max; ++t) {
    for (std::int64_t x = window.x_min; x <= window.x_max; ++x) {
      if (((x + t) & 1) != 0) continue;
      for (Side s : {Side::LeftUp, Side::RightUp}) {
        EdgeRef e{{x, t}, s};
        if (window.contains_edge(e)) cfg.set_open(e, env.is_open(e));
      }
    }
  }
  return cfg;
}

bool MirrorConfig::is_open(const EdgeRef& e) const {
  require_valid(e.from);
  return base_.is_open({{-e.from.x, e.from.t},
                        e.side == Side::LeftUp ? Side::RightUp : Side::LeftUp});
}

std::optional<Window> MirrorConfig::bounds() const {
  auto b = base_.bounds();
  if (!b) return std::nullopt;
  return Window{-b->x_max, -b->x_min, b->t_min, b->t_max};
}

bool TimeReversedConfig::is_open(const EdgeRef& e) const {
  require_valid(e.from);
  // The edge (x,s)->(x-1,s+1) here is the base edge (x-1,-s-1)->(x,-s),
  // a right-up step; likewise the right-up edge maps to a base left-up.
  if (e.side == Side::LeftUp)
    return base_.is_open({{e.from.x - 1, -e.from.t - 1}, Side::RightUp});
  return base_.is_open({{e.from.x + 1, -e.from.t - 1}, Side::LeftUp});
}

void TimeReversedConfig::open_row(std::int64_t t, std::int64_t j_lo,
                                  std::int64_t j_hi, Side side,
                                  std::uint64_t* words) const {
  // Reversed from-vertex x = 2j - t maps to base from-vertex x -+ 1 at level
  // -t - 1, whose diagonal index is j - t - 1 (left-up) or j - t (right-up);
  // either way the j-range stays contiguous and in the same order.
  if (side == Side::LeftUp)
    base_.open_row(-t - 1, j_lo - t - 1, j_hi - t - 1, Side::RightUp, words);
  else
    base_.open_row(-t - 1, j_lo - t, j_hi - t, Side::LeftUp, words);
}

std::optional<Window> TimeReversedConfig::bounds() const {
  auto b = base_.bounds();
  if (!b) return std::nullopt;
  return Window{b->x_min, b->x_max, -b->t_max, -b->t_min};
}

}  // namespace operc
