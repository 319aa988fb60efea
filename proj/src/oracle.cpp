#include <cmath>
#include <deque>

#include "ghomog/reachability.hpp"

namespace ghomog {

std::vector<double> oracle_passage(const Field& field, const Vec& x0, const std::vector<Vec>& targets,
                                   const OracleConfig& cfg) {
  const int d = field.dim();
  Vec lo{0, 0, 0}, hi{0, 0, 0};
  for (int i = 0; i < d; ++i) {
    lo[i] = cfg.center[i] - cfg.half_width;
    hi[i] = cfg.center[i] + cfg.half_width;
  }
  const Grid grid(d, cfg.h, lo, hi);
  if (grid.size() > cfg.max_nodes)
    throw Error(ErrorCode::Budget, "oracle grid has " + std::to_string(grid.size()) + " nodes, limit " +
                                       std::to_string(cfg.max_nodes));
  const auto src = grid.cell_of(x0);
  if (!src) throw Error(ErrorCode::Window, "oracle: source outside window");
  std::vector<std::size_t> goal;
  for (const Vec& t : targets) {
    auto c = grid.cell_of(t);
    if (!c) throw Error(ErrorCode::Window, "oracle: target outside window");
    goal.push_back(*c);
  }

  const auto dirs = control_directions(d, cfg.directions);
  const std::int32_t max_level = static_cast<std::int32_t>(std::ceil(cfg.t_max / cfg.dt));
  std::vector<std::int32_t> level(grid.size(), kUnreached);
  std::vector<std::size_t> frontier{*src}, next;
  level[*src] = 0;
  std::size_t remaining = 0;
  for (std::size_t g : goal) remaining += level[g] == kUnreached ? 1 : 0;

  for (std::int32_t lv = 0; lv < max_level && !frontier.empty() && remaining > 0; ++lv) {
    next.clear();
    for (std::size_t c : frontier) {
      const Vec x = grid.center(c);
      const Vec v = field.eval(x);
      for (const Vec& a : dirs) {
        auto n = grid.cell_of(x + cfg.dt * (a + v));
        if (!n || level[*n] != kUnreached) continue;
        level[*n] = lv + 1;
        next.push_back(*n);
      }
    }
    frontier.swap(next);
    remaining = 0;
    for (std::size_t g : goal) remaining += level[g] == kUnreached ? 1 : 0;
  }

  std::vector<double> out;
  for (std::size_t g : goal)
    out.push_back(level[g] == kUnreached ? std::numeric_limits<double>::infinity() : level[g] * cfg.dt);
  return out;
}

}  // namespace ghomog
