#include "core/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/parallel.hpp"

namespace rfts::forest {

void ForestConfig::validate(std::size_t p) const {
  if (num_trees < 1) throw std::invalid_argument("ForestConfig: num_trees must be >= 1");
  if (min_node_size < 1)
    throw std::invalid_argument("ForestConfig: min_node_size must be >= 1");
  if (mtry < 0 || static_cast<std::size_t>(mtry) > p)
    throw std::invalid_argument("ForestConfig: mtry must lie in [0, p]");
  if (max_depth < 0) throw std::invalid_argument("ForestConfig: max_depth must be >= 0");
  if (!(bootstrap_fraction > 0.0 && bootstrap_fraction <= 1.0))
    throw std::invalid_argument("ForestConfig: bootstrap_fraction must lie in (0, 1]");
}

int ForestConfig::resolved_mtry(std::size_t p) const {
  if (mtry > 0) return mtry;
  return std::max(1, static_cast<int>(std::sqrt(static_cast<double>(p))));
}

int Tree::predict(std::span<const double> z) const {
  const TreeNode* n = &nodes[0];
  while (n->feature >= 0)
    n = &nodes[static_cast<std::size_t>(
        z[static_cast<std::size_t>(n->feature)] <= n->threshold ? n->left : n->right)];
  return n->count1 > n->count0 ? 1 : 0;
}

namespace detail {

// Split search works on dense value ranks, prepared once per training set
// and shared by every tree: rank order equals value order, and equal values
// share a rank, so candidate thresholds are exactly the midpoints between
// adjacent distinct values present in a node.
struct FitContext {
  std::vector<std::vector<std::uint32_t>> ranks;  // per feature: row -> dense rank
  std::vector<std::vector<double>> uniq;          // per feature: sorted distinct values
  std::span<const std::uint8_t> labels;
  std::size_t n_rows = 0;

  FitContext(const std::vector<std::vector<double>>& columns,
             std::span<const std::uint8_t> labels_in) {
    labels = labels_in;
    n_rows = labels.size();
    const std::size_t p = columns.size();
    ranks.resize(p);
    uniq.resize(p);
    std::vector<std::uint32_t> order(n_rows);
    for (std::size_t f = 0; f < p; ++f) {
      const auto& col = columns[f];
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return col[a] < col[b];
      });
      auto& rank = ranks[f];
      rank.assign(n_rows, 0);
      auto& u = uniq[f];
      u.clear();
      for (std::size_t i = 0; i < n_rows; ++i) {
        const double v = col[order[i]];
        if (u.empty() || v > u.back()) u.push_back(v);
        rank[order[i]] = static_cast<std::uint32_t>(u.size() - 1);
      }
    }
  }
};

// Per-node split search. Two evaluation paths with identical candidate
// order and arithmetic: a counting pass over rank buckets for nodes that
// are large relative to the number of distinct values, and a gather/sort
// of packed (rank, label) keys for small nodes.
class NodeSplitter {
 public:
  explicit NodeSplitter(const FitContext& ctx) : ctx_(ctx) {
    bucket_total_.assign(ctx.n_rows + 1, 0);
    bucket_one_.assign(ctx.n_rows + 1, 0);
  }

  struct Choice {
    int feature = -1;
    std::uint32_t rank = 0;  // left child takes ranks <= rank
    double threshold = 0.0;
    double gain = 0.0;
  };

  Choice best_split(std::span<const int> feature_ids,
                    std::span<const std::uint32_t> rows) {
    const std::size_t m = rows.size();
    std::uint32_t c1 = 0;
    for (auto r : rows) c1 += ctx_.labels[r];
    const std::uint32_t c0 = static_cast<std::uint32_t>(m) - c1;
    const double dm = static_cast<double>(m);
    const double parent_score =
        (static_cast<double>(c0) * c0 + static_cast<double>(c1) * c1) / dm;

    Choice best;
    best_score_ = parent_score;
    for (int f : feature_ids) {
      const auto& uniq = ctx_.uniq[static_cast<std::size_t>(f)];
      if (uniq.size() < 2) continue;
      if (m * 16 >= uniq.size())
        scan_buckets(f, rows, c0, c1, best);
      else
        scan_sorted(f, rows, c0, c1, best);
    }
    best.gain = (best_score_ - parent_score) / dm;
    return best;
  }

 private:
  // evaluate the candidate "left = ranks <= prev_rank" given cumulative
  // left counts; shared by both paths so the arithmetic is identical
  void consider(int f, std::uint32_t prev_rank, std::uint32_t next_rank,
                std::uint32_t l0, std::uint32_t l1, std::uint32_t c0, std::uint32_t c1,
                Choice& best) {
    const double dl0 = l0, dl1 = l1;
    const double dr0 = c0 - l0, dr1 = c1 - l1;
    const double nl = dl0 + dl1, nr = dr0 + dr1;
    const double score = (dl0 * dl0 + dl1 * dl1) / nl + (dr0 * dr0 + dr1 * dr1) / nr;
    if (score > best_score_) {
      const auto& uniq = ctx_.uniq[static_cast<std::size_t>(f)];
      const double lo = uniq[prev_rank], hi = uniq[next_rank];
      double thr = lo + 0.5 * (hi - lo);
      if (!(thr < hi)) thr = lo;
      best_score_ = score;
      best.feature = f;
      best.rank = prev_rank;
      best.threshold = thr;
    }
  }

  void scan_buckets(int f, std::span<const std::uint32_t> rows, std::uint32_t c0,
                    std::uint32_t c1, Choice& best) {
    const auto& rank = ctx_.ranks[static_cast<std::size_t>(f)];
    const std::size_t u = ctx_.uniq[static_cast<std::size_t>(f)].size();
    for (auto r : rows) {
      const auto k = rank[r];
      bucket_total_[k] += 1;
      bucket_one_[k] += ctx_.labels[r];
    }
    const auto m = static_cast<std::uint32_t>(rows.size());
    std::uint32_t l0 = 0, l1 = 0;
    bool have_prev = false;
    std::uint32_t prev_rank = 0;
    for (std::uint32_t k = 0; k < u; ++k) {
      const std::uint32_t t = bucket_total_[k];
      if (t == 0) continue;
      if (have_prev && l0 + l1 < m) consider(f, prev_rank, k, l0, l1, c0, c1, best);
      const std::uint32_t one = bucket_one_[k];
      l1 += one;
      l0 += t - one;
      bucket_total_[k] = 0;
      bucket_one_[k] = 0;
      prev_rank = k;
      have_prev = true;
    }
  }

  void scan_sorted(int f, std::span<const std::uint32_t> rows, std::uint32_t c0,
                   std::uint32_t c1, Choice& best) {
    const auto& rank = ctx_.ranks[static_cast<std::size_t>(f)];
    packed_.clear();
    for (auto r : rows)
      packed_.push_back((rank[r] << 1) | static_cast<std::uint32_t>(ctx_.labels[r]));
    std::sort(packed_.begin(), packed_.end());
    const auto m = static_cast<std::uint32_t>(rows.size());
    std::uint32_t l0 = 0, l1 = 0;
    std::uint32_t prev_rank = 0;
    std::size_t i = 0;
    while (i < packed_.size()) {
      const std::uint32_t k = packed_[i] >> 1;
      std::uint32_t t = 0, one = 0;
      while (i < packed_.size() && (packed_[i] >> 1) == k) {
        one += packed_[i] & 1u;
        ++t;
        ++i;
      }
      // boundary before this value group, mirroring scan_buckets
      if (l0 + l1 > 0 && l0 + l1 < m) consider(f, prev_rank, k, l0, l1, c0, c1, best);
      l1 += one;
      l0 += t - one;
      prev_rank = k;
    }
  }

  const FitContext& ctx_;
  double best_score_ = 0.0;
  std::vector<std::uint32_t> bucket_total_;
  std::vector<std::uint32_t> bucket_one_;
  std::vector<std::uint32_t> packed_;
};

SplitChoice best_split(const std::vector<std::vector<double>>& columns,
                       std::span<const int> feature_ids,
                       std::span<const std::size_t> rows,
                       std::span<const std::uint8_t> labels) {
  const FitContext ctx(columns, labels);
  NodeSplitter splitter(ctx);
  std::vector<std::uint32_t> rows32(rows.begin(), rows.end());
  const auto c = splitter.best_split(feature_ids, rows32);
  return {c.feature, c.threshold, c.gain};
}

}  // namespace detail

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const detail::FitContext& ctx, const ForestConfig& cfg, int mtry)
      : ctx_(ctx), cfg_(cfg), mtry_(mtry), splitter_(ctx) {
    feat_perm_.resize(ctx.ranks.size());
    std::iota(feat_perm_.begin(), feat_perm_.end(), 0);
  }

  Tree build(numkit::RngStream rng) {
    rng_ = rng;
    const std::size_t n = ctx_.n_rows;
    const auto k = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(cfg_.bootstrap_fraction * static_cast<double>(n))));
    samples_.resize(k);
    Tree tree;
    tree.in_bag.assign((n + 63) / 64, 0);
    for (std::size_t i = 0; i < k; ++i) {
      const auto row = static_cast<std::uint32_t>(rng_.below(n));
      samples_[i] = row;
      tree.in_bag[row >> 6] |= 1ULL << (row & 63);
    }
    nodes_.clear();
    grow(0, k, 0);
    tree.nodes = std::move(nodes_);
    nodes_ = {};
    return tree;
  }

 private:
  std::int32_t grow(std::size_t b, std::size_t e, int depth) {
    const auto idx = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();

    std::int32_t c1 = 0;
    for (std::size_t i = b; i < e; ++i) c1 += ctx_.labels[samples_[i]];
    const auto count = static_cast<std::int32_t>(e - b);
    const std::int32_t c0 = count - c1;

    const bool can_split = c0 > 0 && c1 > 0 && count >= cfg_.min_node_size &&
                           (cfg_.max_depth == 0 || depth < cfg_.max_depth);
    if (can_split) {
      // random feature subset for this split
      const auto p = feat_perm_.size();
      const auto m = static_cast<std::size_t>(mtry_);
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t swap_with = j + static_cast<std::size_t>(rng_.below(p - j));
        std::swap(feat_perm_[j], feat_perm_[swap_with]);
      }
      const auto choice = splitter_.best_split(
          std::span<const int>(feat_perm_.data(), m),
          std::span<const std::uint32_t>(samples_.data() + b, e - b));
      if (choice.feature >= 0 && choice.gain > 0.0) {
        const auto& rank = ctx_.ranks[static_cast<std::size_t>(choice.feature)];
        auto* first = samples_.data() + b;
        auto* last = samples_.data() + e;
        auto* mid = std::partition(
            first, last, [&](std::uint32_t row) { return rank[row] <= choice.rank; });
        const auto m_idx = b + static_cast<std::size_t>(mid - first);
        if (m_idx > b && m_idx < e) {
          const std::int32_t left = grow(b, m_idx, depth + 1);
          const std::int32_t right = grow(m_idx, e, depth + 1);
          auto& node = nodes_[static_cast<std::size_t>(idx)];
          node.feature = choice.feature;
          node.threshold = choice.threshold;
          node.left = left;
          node.right = right;
          return idx;
        }
      }
    }
    auto& leaf = nodes_[static_cast<std::size_t>(idx)];
    leaf.count0 = c0;
    leaf.count1 = c1;
    return idx;
  }

  const detail::FitContext& ctx_;
  const ForestConfig& cfg_;
  int mtry_;
  detail::NodeSplitter splitter_;
  numkit::RngStream rng_{0};
  std::vector<std::uint32_t> samples_;
  std::vector<int> feat_perm_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

Forest fit(const LabeledDataset& data, const ForestConfig& config,
           numkit::RngStream rng, int jobs) {
  const std::size_t n = data.size();
  const std::size_t p = data.dim();
  config.validate(p);
  if (n < 2) throw std::invalid_argument("forest::fit: need at least 2 rows");
  if (p == 0) throw std::invalid_argument("forest::fit: need at least 1 feature");
  if (!data.has_both_labels())
    throw std::invalid_argument("forest::fit: training data contains a single class");
  if (!data.features.all_finite())
    throw std::invalid_argument("forest::fit: features contain non-finite values");

  std::vector<std::vector<double>> columns(p, std::vector<double>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = data.features.row(r);
    for (std::size_t c = 0; c < p; ++c) columns[c][r] = row[c];
  }
  const detail::FitContext ctx(columns, data.labels);

  Forest forest;
  forest.config = config;
  forest.p = p;
  forest.n_rows = n;
  forest.trees.resize(static_cast<std::size_t>(config.num_trees));
  const int mtry = config.resolved_mtry(p);

  parallel_for(forest.trees.size(), jobs, [&](std::size_t t) {
    TreeBuilder builder(ctx, config, mtry);
    forest.trees[t] = builder.build(rng.split(t));
  });
  return forest;
}

Vote predict_vote(const Forest& forest, std::span<const double> z) {
  if (z.size() != forest.p)
    throw std::invalid_argument("predict_vote: expected dimension " +
                                std::to_string(forest.p) + ", got " +
                                std::to_string(z.size()));
  for (double v : z)
    if (!std::isfinite(v)) throw std::invalid_argument("predict_vote: non-finite input");
  std::size_t ones = 0;
  for (const auto& tree : forest.trees) ones += static_cast<std::size_t>(tree.predict(z));
  Vote v;
  v.fraction_one = static_cast<double>(ones) / static_cast<double>(forest.trees.size());
  v.label = v.fraction_one > 0.5 ? 1 : 0;
  return v;
}

OobResult oob_error(const Forest& forest, const LabeledDataset& data) {
  if (data.size() != forest.n_rows || data.dim() != forest.p)
    throw std::invalid_argument("oob_error: data shape does not match the forest");
  const std::size_t n = data.size();
  std::vector<std::uint32_t> ones(n, 0), total(n, 0);
  for (const auto& tree : forest.trees) {
    for (std::size_t i = 0; i < n; ++i) {
      if (tree.row_in_bag(i)) continue;
      ones[i] += static_cast<std::uint32_t>(tree.predict(data.features.row(i)));
      ++total[i];
    }
  }
  OobResult res;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (total[i] == 0) {
      ++res.skipped;
      continue;
    }
    const int pred = 2 * ones[i] > total[i] ? 1 : 0;
    wrong += static_cast<std::size_t>(pred != data.labels[i]);
    ++res.evaluated;
  }
  if (res.evaluated == 0)
    throw ComputeError("oob_error: no observation has an excluding tree (degenerate OOB)");
  res.error = static_cast<double>(wrong) / static_cast<double>(res.evaluated);
  return res;
}

}  // namespace rfts::forest
