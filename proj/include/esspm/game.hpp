#pragma once

// Payoff matrices, mixed strategies and expected utilities for two-player
// symmetric games. Player 2's payoffs are the transpose of player 1's, so a
// game is fully described by the row player's m x m table.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace esspm {

/// Thrown by read_game on malformed input; what() carries the line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class GameMatrix {
 public:
  GameMatrix(std::size_t m, std::vector<double> payoffs) : m_(m), a_(std::move(payoffs)) {
    if (m_ < 2) throw std::invalid_argument("game needs at least 2 pure strategies");
    if (a_.size() != m_ * m_) throw std::invalid_argument("payoff table is not m x m");
    for (double v : a_)
      if (!std::isfinite(v)) throw std::invalid_argument("payoff entries must be finite");
  }

  GameMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : GameMatrix(rows.size(), flatten(rows)) {}

  std::size_t size() const noexcept { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * m_ + j]; }
  std::span<const double> row(std::size_t i) const { return {a_.data() + i * m_, m_}; }
  std::span<const double> data() const noexcept { return a_; }

  double min_entry() const { return *std::min_element(a_.begin(), a_.end()); }
  double max_entry() const { return *std::max_element(a_.begin(), a_.end()); }
  bool is_normalized() const { return min_entry() >= 0.0 && max_entry() <= 1.0; }

  /// alpha * A + beta, entrywise.
  GameMatrix affine(double alpha, double beta) const {
    std::vector<double> out(a_);
    for (double& v : out) v = alpha * v + beta;
    return {m_, std::move(out)};
  }

  friend bool operator==(const GameMatrix&, const GameMatrix&) = default;

 private:
  static std::vector<double> flatten(std::initializer_list<std::initializer_list<double>> rows) {
    std::vector<double> out;
    for (const auto& r : rows) {
      if (r.size() != rows.size()) throw std::invalid_argument("payoff table is not square");
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }

  std::size_t m_;
  std::vector<double> a_;
};

inline constexpr double kSimplexTol = 1e-9;

class MixedStrategy {
 public:
  explicit MixedStrategy(std::vector<double> probs) : p_(std::move(probs)) {
    if (p_.empty()) throw std::invalid_argument("empty strategy");
    double sum = 0.0;
    for (double v : p_) {
      if (!(v >= 0.0)) throw std::invalid_argument("strategy has a negative component");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTol)
      throw std::invalid_argument("strategy components do not sum to 1");
  }

  static MixedStrategy pure(std::size_t m, std::size_t i) {
    if (i >= m) throw std::out_of_range("pure strategy index out of range");
    std::vector<double> p(m, 0.0);
    p[i] = 1.0;
    return MixedStrategy(std::move(p));
  }

  static MixedStrategy uniform(std::size_t m) {
    return MixedStrategy(std::vector<double>(m, 1.0 / static_cast<double>(m)));
  }

  /// Clamp tiny negatives (>= -clamp_tol) to zero and renormalize.
  static MixedStrategy clamped(std::vector<double> probs, double clamp_tol = kSimplexTol) {
    for (double& v : probs) {
      if (v < -clamp_tol) throw std::invalid_argument("strategy component below clamp tolerance");
      v = std::max(v, 0.0);
    }
    double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (sum <= 0.0) throw std::invalid_argument("strategy has zero mass");
    for (double& v : probs) v /= sum;
    return MixedStrategy(std::move(probs));
  }

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> probs() const noexcept { return p_; }

  /// Index of the component equal to one, if this is (numerically) a pure strategy.
  bool is_pure(double tol = 1e-6) const {
    return *std::max_element(p_.begin(), p_.end()) >= 1.0 - tol;
  }

  double linf_distance(const MixedStrategy& other) const {
    if (other.size() != size()) throw std::invalid_argument("dimension mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p_.size(); ++i) d = std::max(d, std::abs(p_[i] - other.p_[i]));
    return d;
  }

  friend bool operator==(const MixedStrategy&, const MixedStrategy&) = default;

 private:
  std::vector<double> p_;
};

/// Strictly increasing, nonempty set of pure-strategy indices.
class Support {
 public:
  Support(std::vector<std::size_t> indices, std::size_t m) : idx_(std::move(indices)) {
    if (idx_.empty()) throw std::invalid_argument("support must be nonempty");
    for (std::size_t k = 0; k < idx_.size(); ++k) {
      if (idx_[k] >= m) throw std::out_of_range("support index out of range");
      if (k > 0 && idx_[k] <= idx_[k - 1])
        throw std::invalid_argument("support indices must be strictly increasing");
    }
  }

  /// Nonzero pattern of a strategy (components above threshold).
  static Support of(const MixedStrategy& x, double threshold = kSimplexTol) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] > threshold) idx.push_back(i);
    return Support(std::move(idx), x.size());
  }

  std::size_t size() const noexcept { return idx_.size(); }
  std::span<const std::size_t> indices() const noexcept { return idx_; }
  bool contains(std::size_t i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }

  friend bool operator==(const Support&, const Support&) = default;

 private:
  std::vector<std::size_t> idx_;
};

// ---------------------------------------------------------------------------
// Expected utilities

/// u1(pure i, w) = (A w)_i
inline double row_payoff(const GameMatrix& g, std::size_t i, std::span<const double> w) {
  if (w.size() != g.size()) throw std::invalid_argument("dimension mismatch");
  auto r = g.row(i);
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s += r[j] * w[j];
  return s;
}

/// u1(v, pure j) = (v^T A)_j
inline double column_payoff(const GameMatrix& g, std::span<const double> v, std::size_t j) {
  if (v.size() != g.size()) throw std::invalid_argument("dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * g(i, j);
  return s;
}

/// u1(v, w) = v^T A w
inline double utility(const GameMatrix& g, std::span<const double> v, std::span<const double> w) {
  if (v.size() != g.size() || w.size() != g.size()) throw std::invalid_argument("dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) s += v[i] * row_payoff(g, i, w);
  return s;
}

inline double utility(const GameMatrix& g, const MixedStrategy& v, const MixedStrategy& w) {
  return utility(g, v.probs(), w.probs());
}

/// Affine rescale onto [0,1]; a constant game maps to all zeros.
inline GameMatrix normalize(const GameMatrix& g) {
  const double lo = g.min_entry();
  const double hi = g.max_entry();
  std::vector<double> out(g.data().begin(), g.data().end());
  if (hi == lo) {
    std::fill(out.begin(), out.end(), 0.0);
  } else {
    const double span = hi - lo;
    for (double& v : out) v = std::clamp((v - lo) / span, 0.0, 1.0);
  }
  return {g.size(), std::move(out)};
}

// ---------------------------------------------------------------------------
// Text format: first line m, then m rows of m reals. '#' lines are comments.

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline double parse_real(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw ParseError(line, "non-numeric token '" + std::string(tok) + "'");
  return v;
}

inline std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline GameMatrix read_game(std::string_view text) {
  std::size_t m = 0;
  std::size_t line_no = 0;
  std::vector<double> payoffs;
  std::size_t rows_read = 0;
  bool have_header = false;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = detail::trim(text.substr(pos, nl - pos));
    ++line_no;
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;

    auto toks = detail::split_ws(line);
    if (!have_header) {
      if (toks.size() != 1) throw ParseError(line_no, "header must be a single integer m");
      long long parsed = 0;
      auto [ptr, ec] = std::from_chars(toks[0].data(), toks[0].data() + toks[0].size(), parsed);
      if (ec != std::errc() || ptr != toks[0].data() + toks[0].size())
        throw ParseError(line_no, "header is not an integer: '" + std::string(toks[0]) + "'");
      if (parsed < 2) throw ParseError(line_no, "m must be at least 2");
      m = static_cast<std::size_t>(parsed);
      payoffs.reserve(m * m);
      have_header = true;
      continue;
    }
    if (rows_read == m) throw ParseError(line_no, "unexpected extra row");
    ++rows_read;
    if (toks.size() != m)
      throw ParseError(line_no, "row " + std::to_string(rows_read) + " has " +
                                    std::to_string(toks.size()) + " of " + std::to_string(m) +
                                    " entries");
    for (auto tok : toks) payoffs.push_back(detail::parse_real(tok, line_no));
  }
  if (!have_header) throw ParseError(line_no, "missing header");
  if (rows_read != m)
    throw ParseError(line_no, "expected " + std::to_string(m) + " rows, got " +
                                  std::to_string(rows_read));
  return {m, std::move(payoffs)};
}

/// Shortest round-trip decimal form of every entry, LF line endings.
inline std::string write_game(const GameMatrix& g) {
  std::ostringstream os;
  os << g.size() << '\n';
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (j) os << ' ';
      os << detail::format_real(g(i, j));
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace esspm
