#ifndef OPERC_ENV_HPP
#define OPERC_ENV_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <unordered_map>

#include "operc/lattice.hpp"

namespace operc {

/**
 * A (possibly infinite) assignment of open/closed to every oriented edge.
 *
 * open_row is the bulk accessor the sweep engine uses: it fills one bit per
 * site j in [j_lo, j_hi] of the diagonal coordinate j = (x + t) / 2, where
 * bit i of words[i / 64] corresponds to j = j_lo + i. The default
 * implementation loops over is_open; subclasses may override it with
 * something faster but must stay bit-identical to is_open.
 */
class Environment {
 public:
  virtual ~Environment() = default;

  virtual bool is_open(const EdgeRef& e) const = 0;

  // Bounding window of defined edges, or nullopt when every edge exists.
  virtual std::optional<Window> bounds() const { return std::nullopt; }

  virtual void open_row(std::int64_t t, std::int64_t j_lo, std::int64_t j_hi,
                        Side side, std::uint64_t* words) const;
};

/**
 * Procedurally generated i.i.d. environment. Every edge draws a uniform
 * value from a counter-based hash of (seed, x, t, side) and is open when
 * that value is < p. The hash is part of the file-format contract and
 * never changes:
 *
 *   mix(z):  z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
 *            z ^= z >> 27; z *= 0x94D049BB133111EB;
 *            z ^= z >> 31
 *   h0   = mix(seed + 0x9E3779B97F4A7C15)
 *   a    = mix(h0 ^ (x * 0xD6E8FEB86659FD93))
 *   bits = mix(a ^ (t * 0x8BB84B93962EACC9) ^ (side == R ? 0x632BE59BD9B4E019 : 0))
 *   u    = (bits >> 11) * 2^-53          // 53-bit uniform in [0, 1)
 *
 * All arithmetic is over uint64 with two's-complement casts of x and t, so
 * values are bit-identical across platforms. Sharing the seed across
 * different p couples the configurations monotonically: raising p only
 * opens more edges.
 */
class EdgeConfig final : public Environment {
 public:
  EdgeConfig(double p, std::uint64_t seed);

  bool is_open(const EdgeRef& e) const override;
  void open_row(std::int64_t t, std::int64_t j_lo, std::int64_t j_hi,
                Side side, std::uint64_t* words) const override;

  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }

  static std::uint64_t edge_bits(std::uint64_t seed, const EdgeRef& e);
  static double edge_uniform(std::uint64_t seed, const EdgeRef& e);

 private:
  double p_;
  std::uint64_t seed_, h0_;
  // Open iff (bits >> 11) < threshold_, with threshold_ = ceil(p * 2^53).
  // Multiplying a double by a power of two is exact, so this reproduces
  // u < p for the 53-bit uniform u without any rounding slack.
  std::uint64_t threshold_;
};

/**
 * Explicit open/closed flags for exactly the edges with both endpoints in
 * a window. Queries outside raise InsufficientWindowError rather than
 * inventing an answer.
 */
class ExplicitConfig final : public Environment {
 public:
  ExplicitConfig(const Window& window, double p = 0.0, std::uint64_t seed = 0,
                 bool all_open = false);

  bool is_open(const EdgeRef& e) const override;
  std::optional<Window> bounds() const override { return window_; }

  void set_open(const EdgeRef& e, bool open);
  bool has_edge(const EdgeRef& e) const;
  std::size_t edge_count() const { return flags_.size(); }

  const Window& window() const { return window_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }

  // Text form: header "window x_min x_max t_min t_max; p; seed", then one
  // line "x,t,L|R,0|1" per edge, sorted by (t, x, side).
  void save(std::ostream& os) const;
  static ExplicitConfig load(std::istream& is);

 private:
  Window window_;
  double p_;
  std::uint64_t seed_;
  std::unordered_map<std::uint64_t, bool> flags_;

  static std::uint64_t key(const EdgeRef& e);
};

// Materialize the window's edges of any environment.
ExplicitConfig snapshot(const Environment& env, const Window& window,
                        double p = 0.0, std::uint64_t seed = 0);

/** View of another environment with x negated (left and right swapped). */
class MirrorConfig final : public Environment {
 public:
  explicit MirrorConfig(const Environment& base) : base_(base) {}
  bool is_open(const EdgeRef& e) const override;
  std::optional<Window> bounds() const override;

 private:
  const Environment& base_;
};

/**
 * View of another environment with t negated: vertex (x, s) stands for
 * (x, -s) of the base, and an upward edge here is the base's upward edge
 * traversed downward. Growing a cluster in this view computes the base's
 * anti-oriented (descending) reachability.
 */
class TimeReversedConfig final : public Environment {
 public:
  explicit TimeReversedConfig(const Environment& base) : base_(base) {}
  // copying would silently shadow the converting constructor when the
  // argument is itself a reversal; force the caller through Environment&
  TimeReversedConfig(const TimeReversedConfig&) = delete;
  TimeReversedConfig& operator=(const TimeReversedConfig&) = delete;

  bool is_open(const EdgeRef& e) const override;
  void open_row(std::int64_t t, std::int64_t j_lo, std::int64_t j_hi,
                Side side, std::uint64_t* words) const override;
  std::optional<Window> bounds() const override;

 private:
  const Environment& base_;
};

}  // namespace operc

#endif  // OPERC_ENV_HPP
