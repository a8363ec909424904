#include "jsrcert/jsr_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace jsrcert {

namespace {

double root_rate(double x, int t) {
  return t == 1 ? x : std::pow(x, 1.0 / t);
}

// True if (value, word) should replace (best_value, best_word).
bool improves(double value, const Word& word, double best_value, const Word& best_word) {
  if (best_word.empty()) return true;
  const double scale = std::max(std::abs(value), std::abs(best_value));
  if (std::abs(value - best_value) > kWitnessTieTolerance * scale) {
    return value > best_value;
  }
  if (word.size() != best_word.size()) return word.size() < best_word.size();
  return word < best_word;
}

// Sum_{t=1..len} m^t, saturating.
std::int64_t word_count(int m, int len) {
  std::int64_t total = 0;
  std::int64_t level = 1;
  for (int t = 1; t <= len; ++t) {
    if (level > std::numeric_limits<std::int64_t>::max() / m) {
      return std::numeric_limits<std::int64_t>::max();
    }
    level *= m;
    if (total > std::numeric_limits<std::int64_t>::max() - level) {
      return std::numeric_limits<std::int64_t>::max();
    }
    total += level;
  }
  return total;
}

struct Enumeration {
  LowerBound lower;
  std::vector<double> level_norm_max;  // index t-1
  int depth = 0;
  bool truncated = false;
  std::int64_t products = 0;
};

// Exhaustive depth-first enumeration of every word of length <= max_len.
// If the full tree exceeds `budget`, the depth is reduced to the largest
// one that fits and the result is flagged truncated.
Enumeration enumerate(const MatrixSet& set, int max_len, std::int64_t budget) {
  if (max_len < 1) throw std::invalid_argument("enumeration depth must be >= 1");
  const int m = set.size();
  Enumeration out;
  int depth = max_len;
  while (depth > 1 && word_count(m, depth) > budget) --depth;
  out.truncated = depth < max_len;
  out.depth = depth;
  out.level_norm_max.assign(static_cast<std::size_t>(depth), 0.0);

  std::vector<Matrix> prefix(static_cast<std::size_t>(depth));
  Word word;
  word.reserve(static_cast<std::size_t>(depth));
  word.push_back(1);
  while (!word.empty()) {
    const auto t = static_cast<int>(word.size());
    const Matrix& a = set[word.back()];
    prefix[static_cast<std::size_t>(t - 1)] =
        t == 1 ? a : Matrix(a * prefix[static_cast<std::size_t>(t - 2)]);
    const Matrix& p = prefix[static_cast<std::size_t>(t - 1)];
    ++out.products;

    const double rate = root_rate(spectral_radius(p), t);
    if (improves(rate, word, out.lower.value, out.lower.witness.word)) {
      out.lower.value = rate;
      out.lower.witness = ProductWord{word, p};
    }
    double& level = out.level_norm_max[static_cast<std::size_t>(t - 1)];
    level = std::max(level, root_rate(operator_norm(p), t));

    if (t < depth) {
      word.push_back(1);
      continue;
    }
    while (!word.empty() && word.back() == m) word.pop_back();
    if (!word.empty()) ++word.back();
  }
  out.lower.truncated = out.truncated;
  return out;
}

}  // namespace

LowerBound rho_lower(const MatrixSet& set, int max_len, std::int64_t budget) {
  return enumerate(set, max_len, budget).lower;
}

UpperBound rho_upper(const MatrixSet& set, int max_len, std::int64_t budget) {
  const Enumeration e = enumerate(set, max_len, budget);
  UpperBound out;
  out.value = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < e.level_norm_max.size(); ++t) {
    if (e.level_norm_max[t] < out.value) {
      out.value = e.level_norm_max[t];
      out.best_length = static_cast<int>(t) + 1;
    }
  }
  out.completed_depth = e.depth;
  out.truncated = e.truncated;
  return out;
}

JsrBracket exhaustive_bracket(const MatrixSet& set, int max_len, std::int64_t budget) {
  const Enumeration e = enumerate(set, max_len, budget);
  JsrBracket b;
  b.lower = e.lower.value;
  b.lower_witness = e.lower.witness;
  b.upper = *std::min_element(e.level_norm_max.begin(), e.level_norm_max.end());
  b.depth = e.depth;
  b.products = e.products;
  return b;
}

namespace {

struct GripenbergPass {
  double upper = 0.0;
  bool complete = false;
  int deepest = 0;
};

class Gripenberg {
 public:
  Gripenberg(const MatrixSet& set, const GripenbergOptions& opt) : set_(set), opt_(opt) {}

  JsrBracket run() {
    JsrBracket best;
    bool have_pass = false;
    for (int cap = 1; cap <= opt_.max_depth; ++cap) {
      const GripenbergPass pass = run_pass(cap);
      if (!pass.complete) break;
      have_pass = true;
      best.upper = pass.upper;
      best.depth = pass.deepest;
      best.pruned_count = pruned_;
      if (pass.upper - lower_ <= opt_.delta) {
        best.converged = true;
        break;
      }
      // Nothing left below the cap: deeper passes would repeat this one.
      if (pass.deepest < cap) break;
    }
    if (!have_pass) {
      // Not even depth 1 fit the budget; fall back to the trivial bracket.
      best.upper = 0.0;
      for (const Matrix& a : set_.members()) best.upper = std::max(best.upper, operator_norm(a));
      best.depth = 1;
    }
    best.lower = lower_;
    best.lower_witness = witness_;
    best.products = products_;
    return best;
  }

 private:
  GripenbergPass run_pass(int cap) {
    const int m = set_.size();
    pruned_ = 0;
    GripenbergPass pass;
    // Level t (1-based) keeps the suffix products of the current word:
    // suffix[t-1][j] = A_{s_t} ... A_{s_{j+1}} for j = 0..t-1, and bound[t-1] = e.
    std::vector<std::vector<Matrix>> suffix(static_cast<std::size_t>(cap));
    std::vector<double> bound(static_cast<std::size_t>(cap));
    Word word{1};
    while (!word.empty()) {
      if (products_ >= opt_.budget) return pass;
      const auto t = static_cast<int>(word.size());
      const auto ti = static_cast<std::size_t>(t - 1);
      const Matrix& a = set_[word.back()];
      auto& suf = suffix[ti];
      suf.resize(ti + 1);
      for (std::size_t j = 0; j < ti; ++j) suf[j] = a * suffix[ti - 1][j];
      suf[ti] = a;
      ++products_;
      pass.deepest = std::max(pass.deepest, t);

      const Matrix& p = suf[0];
      const double rate = root_rate(spectral_radius(p), t);
      if (improves(rate, word, lower_, witness_.word)) {
        lower_ = rate;
        witness_ = ProductWord{word, p};
      }
      double e = root_rate(operator_norm(p), t);
      for (std::size_t j = 1; j < ti + 1; ++j) {
        const double tail = root_rate(operator_norm(suf[j]), t - static_cast<int>(j));
        e = std::min(e, std::max(bound[j - 1], tail));
      }
      bound[ti] = e;

      const bool prune = e <= lower_ + opt_.delta;
      if (prune) ++pruned_;
      if (prune || t == cap) {
        pass.upper = std::max(pass.upper, e);
      } else {
        word.push_back(1);
        continue;
      }
      while (!word.empty() && word.back() == m) word.pop_back();
      if (!word.empty()) ++word.back();
    }
    pass.complete = true;
    return pass;
  }

  const MatrixSet& set_;
  GripenbergOptions opt_;
  double lower_ = 0.0;
  ProductWord witness_;
  std::int64_t products_ = 0;
  std::int64_t pruned_ = 0;
};

}  // namespace

JsrBracket gripenberg(const MatrixSet& set, const GripenbergOptions& options) {
  if (!(options.delta > 0.0)) throw std::invalid_argument("gripenberg: delta must be > 0");
  if (options.max_depth < 1) throw std::invalid_argument("gripenberg: max_depth must be >= 1");
  return Gripenberg(set, options).run();
}

OptimalProductReport optimal_product_search(const MatrixSet& set, int max_len, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("optimal_product_search: tol must be > 0");
  const JsrBracket b = exhaustive_bracket(set, max_len);
  OptimalProductReport r;
  r.witness = b.lower_witness;
  r.value = b.lower;
  r.upper = b.upper;
  r.certified_tight = r.value >= r.upper - tol;
  return r;
}

}  // namespace jsrcert
