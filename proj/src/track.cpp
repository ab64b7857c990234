#include "dynppr/track.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dynppr/errors.hpp"
#include "dynppr/hash_kernel.hpp"

namespace dynppr {

double movement(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidArgument, "movement: dimension mismatch");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const bool za = na == 0.0, zb = nb == 0.0;
  if (za && zb) return 0.0;
  if (za || zb) return 1.0;
  const double cos = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
  return 1.0 - cos;
}

std::map<NodeId, double> z_scores(const std::map<NodeId, double>& movements) {
  if (movements.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "z-scores need at least two nodes");
  }
  const double n = static_cast<double>(movements.size());
  double mean = 0.0;
  for (const auto& [node, m] : movements) mean += m;
  mean /= n;
  double var = 0.0;
  for (const auto& [node, m] : movements) var += (m - mean) * (m - mean);
  const double sigma = std::sqrt(var / n);

  std::map<NodeId, double> out;
  // Relative cut so rounding noise in equal inputs is still treated as zero spread.
  const bool degenerate = !(sigma > 1e-14 * std::max(1.0, std::abs(mean)));
  for (const auto& [node, m] : movements) out[node] = degenerate ? 0.0 : (m - mean) / sigma;
  return out;
}

ChangeReport build_change_report(std::size_t snapshot, std::span<const TrackedSample> previous,
                                 std::span<const TrackedSample> current,
                                 double min_degree_change) {
  ChangeReport report;
  report.snapshot = snapshot;
  std::map<NodeId, const TrackedSample*> before;
  for (const TrackedSample& s : previous) before[s.node] = &s;

  std::map<NodeId, double> moves;
  for (const TrackedSample& s : current) {
    auto it = before.find(s.node);
    if (it == before.end()) continue;
    const double mv = movement(it->second->embedding, s.embedding);
    moves[s.node] = mv;
    report.rows.push_back({s.node, s.degree, s.degree - it->second->degree, mv, 0.0});
  }
  if (moves.size() >= 2) {
    const auto z = z_scores(moves);
    for (ChangeRow& row : report.rows) row.z_score = z.at(row.node);
  }
  if (min_degree_change > 0.0) {
    std::erase_if(report.rows, [&](const ChangeRow& r) {
      return !(std::abs(r.degree_change) > min_degree_change);
    });
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const ChangeRow& a, const ChangeRow& b) {
    if (a.z_score != b.z_score) return a.z_score > b.z_score;
    if (a.degree_change != b.degree_change) return a.degree_change > b.degree_change;
    return a.node < b.node;
  });
  return report;
}

CommuteState::CommuteState(std::size_t dim, std::uint64_t seed, CommuteInit init)
    : dim_(dim), seed_(seed), init_(init) {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "commute dimension must be >= 1");
}

const std::vector<double>* CommuteState::vector(NodeId v) const {
  const std::size_t* i = index_.find(v);
  return i ? &vectors_[*i] : nullptr;
}

void CommuteState::set_vector(NodeId v, std::vector<double> w) {
  if (w.size() != dim_) throw Error(ErrorCode::kInvalidArgument, "commute: dimension mismatch");
  ensure(v) = std::move(w);
}

std::vector<double> CommuteState::initial_vector(NodeId v) const {
  std::mt19937_64 rng(fmix64(seed_ ^ fmix64(static_cast<std::uint64_t>(v) + 1)));
  std::vector<double> w(dim_);
  if (init_ == CommuteInit::kUniform) {
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    for (double& x : w) x = dist(rng) / static_cast<double>(dim_);
  } else {
    std::normal_distribution<double> dist(0.0, std::sqrt(0.1));
    for (double& x : w) x = dist(rng);
  }
  return w;
}

std::vector<double>& CommuteState::ensure(NodeId v) {
  if (const std::size_t* i = index_.find(v)) return vectors_[*i];
  index_[v] = vectors_.size();
  vectors_.push_back(initial_vector(v));
  return vectors_.back();
}

void CommuteState::step(const EdgeEvent& ev, double degree_u, double degree_v) {
  if (ev.op != EdgeOp::kInsert) return;
  if (!(degree_u > 0.0) || !(degree_v > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "commute: post-insert degrees must be positive");
  }
  ensure(ev.u);
  ensure(ev.v);
  std::vector<double>& wu = vectors_[*index_.find(ev.u)];
  std::vector<double>& wv = vectors_[*index_.find(ev.v)];
  const double keep_u = degree_u / (degree_u + 1.0);
  for (std::size_t k = 0; k < dim_; ++k) wu[k] = keep_u * wu[k] + wv[k] / degree_u;
  const double keep_v = degree_v / (degree_v + 1.0);
  for (std::size_t k = 0; k < dim_; ++k) wv[k] = keep_v * wv[k] + wu[k] / degree_v;
}

void commute_step(CommuteState& state, const EdgeEvent& ev, const Graph& g_after) {
  if (ev.op != EdgeOp::kInsert) return;
  state.step(ev, g_after.degree(ev.u), g_after.degree(ev.v));
}

}  // namespace dynppr
