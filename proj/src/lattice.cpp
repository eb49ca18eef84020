#include "operc/lattice.hpp"

#include <charconv>
#include <ostream>

namespace operc {

std::vector<Vertex> cone(Vertex u, Direction dir, std::int64_t depth) {
  require_valid(u);
  if (depth < 0) throw ContractError("cone depth must be >= 0");
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>((depth + 1) * (depth + 1)));
  const std::int64_t step = dir == Direction::Forward ? 1 : -1;
  for (std::int64_t d = 0; d <= depth; ++d) {
    const std::int64_t t = u.t + step * d;
    for (std::int64_t x = u.x - d; x <= u.x + d; x += 2) out.push_back({x, t});
  }
  return out;
}

std::vector<Vertex> cone_of_set(std::span<const Vertex> a, Direction dir,
                                std::int64_t depth) {
  if (a.empty()) return {};
  const std::int64_t level = a.front().t;
  std::int64_t lo = a.front().x, hi = a.front().x;
  for (const Vertex& v : a) {
    require_valid(v);
    if (v.t != level)
      throw ContractError("cone_of_set expects sites on one level");
    lo = std::min(lo, v.x);
    hi = std::max(hi, v.x);
  }
  std::vector<Vertex> out;
  const std::int64_t step = dir == Direction::Forward ? 1 : -1;
  for (std::int64_t d = 0; d <= depth; ++d) {
    const std::int64_t t = level + step * d;
    for (std::int64_t x = lo - d; x <= hi + d; x += 2) {
      if (((x + t) & 1) == 0) out.push_back({x, t});
    }
  }
  return out;
}

Window cone_window(Vertex u, Direction dir, std::int64_t depth) {
  require_valid(u);
  if (depth < 0) throw ContractError("cone depth must be >= 0");
  if (dir == Direction::Forward)
    return {u.x - depth, u.x + depth, u.t, u.t + depth};
  return {u.x - depth, u.x + depth, u.t - depth, u.t};
}

std::string to_string(Vertex v) {
  return std::to_string(v.x) + "," + std::to_string(v.t);
}

std::string to_string(const EdgeRef& e) {
  return to_string(e.from) + "," + side_char(e.side);
}

namespace {

std::int64_t parse_int(std::string_view s, long line) {
  std::int64_t value = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw ParseError(line, "expected integer, got '" + std::string(s) + "'");
  return value;
}

}  // namespace

Vertex parse_vertex(const std::string& s, long line) {
  const auto comma = s.find(',');
  if (comma == std::string::npos)
    throw ParseError(line, "expected 'x,t', got '" + s + "'");
  Vertex v{parse_int(std::string_view(s).substr(0, comma), line),
           parse_int(std::string_view(s).substr(comma + 1), line)};
  if (!v.valid())
    throw ParseError(line, "vertex '" + s + "' has odd parity");
  return v;
}

EdgeRef parse_edge(const std::string& s, long line) {
  const auto last_comma = s.rfind(',');
  if (last_comma == std::string::npos || last_comma + 2 != s.size())
    throw ParseError(line, "expected 'x,t,L' or 'x,t,R', got '" + s + "'");
  const char c = s[last_comma + 1];
  if (c != 'L' && c != 'R')
    throw ParseError(line, "edge side must be L or R, got '" + s + "'");
  Vertex from = parse_vertex(s.substr(0, last_comma), line);
  return {from, c == 'L' ? Side::LeftUp : Side::RightUp};
}

std::ostream& operator<<(std::ostream& os, const Vertex& v) {
  return os << "(" << v.x << "," << v.t << ")";
}

}  // namespace operc
