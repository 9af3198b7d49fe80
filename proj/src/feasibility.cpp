#include "otz/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "otz/reduce.hpp"

namespace otz {

namespace {

// Dinic's max-flow with real capacities. Augmenting paths stop once residual
// capacity falls below eps, which bounds the achievable slack.
class MaxFlow {
 public:
  MaxFlow(int nodes, double eps) : head_(nodes, -1), eps_(eps) {}

  void add_edge(int from, int to, double cap) {
    edges_.push_back({to, head_[from], cap});
    head_[from] = int(edges_.size()) - 1;
    edges_.push_back({from, head_[to], 0.0});
    head_[to] = int(edges_.size()) - 1;
  }

  double run(int s, int t) {
    double total = 0.0;
    while (bfs(s, t)) {
      iter_ = head_;
      for (;;) {
        const double pushed =
            dfs(s, t, std::numeric_limits<double>::infinity());
        if (pushed <= 0.0) break;
        total += pushed;
      }
    }
    return total;
  }

 private:
  struct Edge {
    int to, next;
    double cap;
  };

  bool bfs(int s, int t) {
    level_.assign(head_.size(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int e = head_[u]; e != -1; e = edges_[e].next) {
        if (edges_[e].cap > eps_ && level_[edges_[e].to] < 0) {
          level_[edges_[e].to] = level_[u] + 1;
          q.push(edges_[e].to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(int u, int t, double limit) {
    if (u == t) return limit;
    for (int& e = iter_[u]; e != -1; e = edges_[e].next) {
      Edge& fwd = edges_[e];
      if (fwd.cap <= eps_ || level_[fwd.to] != level_[u] + 1) continue;
      const double pushed = dfs(fwd.to, t, std::min(limit, fwd.cap));
      if (pushed > 0.0) {
        fwd.cap -= pushed;
        edges_[e ^ 1].cap += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<int> head_, level_, iter_;
  std::vector<Edge> edges_;
  double eps_;
};

}  // namespace

Feasibility check_feasibility_exact(const ProblemInstance& inst,
                                    double balance_rel_tol) {
  if (long(inst.m) * long(inst.n) > 1000000)
    throw Error(ErrorCode::TooLarge,
                "feasibility check is intended for m*n <= 1e6");
  std::vector<Violation> violations = validate_instance(inst);
  if (!violations.empty()) throw ValidationError(std::move(violations));

  const double sum_u = pairwise_sum(inst.marginals.u_tilde.data(),
                                    inst.marginals.u_tilde.size());
  const double sum_v = pairwise_sum(inst.marginals.v_tilde.data(),
                                    inst.marginals.v_tilde.size());
  const double scale = std::max(sum_u, sum_v);
  if (std::abs(sum_u - sum_v) > balance_rel_tol * scale)
    throw Error(ErrorCode::UnbalancedInput,
                "marginal totals differ: sum(u_tilde) = " +
                    std::to_string(sum_u) + ", sum(v_tilde) = " +
                    std::to_string(sum_v));

  const auto pattern = ZeroPattern::create(inst.m, inst.n, inst.zero_pattern);
  const int source = 0, sink = inst.m + inst.n + 1;
  MaxFlow flow(inst.m + inst.n + 2, 1e-13 * scale);
  for (int i = 0; i < inst.m; ++i)
    flow.add_edge(source, 1 + i, inst.marginals.u_tilde[i]);
  for (int j = 0; j < inst.n; ++j)
    flow.add_edge(1 + inst.m + j, sink, inst.marginals.v_tilde[j]);
  for (std::size_t pos = 0; pos < pattern->support_size(); ++pos)
    flow.add_edge(1 + pattern->support_row(pos),
                  1 + inst.m + pattern->support_col(pos), sum_u);

  const double value = flow.run(source, sink);
  return sum_u - value <= balance_rel_tol * scale ? Feasibility::Feasible
                                                  : Feasibility::Infeasible;
}

}  // namespace otz
