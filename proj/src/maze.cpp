#include "cio/maze.hpp"

#include <array>
#include <vector>

#include "cio/rng.hpp"

namespace cio {

namespace {

struct Grid {
  int n;
  // open[d][i][j]: passage carved from cell (i,j) towards +x (d=0) / +y (d=1)
  std::vector<uint8_t> open_x, open_y;

  explicit Grid(int cells) : n(cells), open_x(cells * cells, 0), open_y(cells * cells, 0) {}
  int idx(int i, int j) const { return i * n + j; }
};

void carve(Grid& g, Rng& rng) {
  std::vector<uint8_t> visited(g.n * g.n, 0);
  std::vector<std::pair<int, int>> stack;
  stack.emplace_back(0, 0);
  visited[g.idx(0, 0)] = 1;

  while (!stack.empty()) {
    auto [i, j] = stack.back();
    std::array<int, 4> dirs{0, 1, 2, 3};
    // Fisher-Yates with the scenario RNG keeps generation seed-stable.
    for (int k = 3; k > 0; --k) {
      const int m = static_cast<int>(rng.next_u64() % static_cast<uint64_t>(k + 1));
      std::swap(dirs[k], dirs[m]);
    }
    bool advanced = false;
    for (int d : dirs) {
      const int di = d == 0 ? 1 : d == 1 ? -1 : 0;
      const int dj = d == 2 ? 1 : d == 3 ? -1 : 0;
      const int ni = i + di;
      const int nj = j + dj;
      if (ni < 0 || nj < 0 || ni >= g.n || nj >= g.n) continue;
      if (visited[g.idx(ni, nj)]) continue;
      if (d == 0) g.open_x[g.idx(i, j)] = 1;
      if (d == 1) g.open_x[g.idx(ni, nj)] = 1;
      if (d == 2) g.open_y[g.idx(i, j)] = 1;
      if (d == 3) g.open_y[g.idx(ni, nj)] = 1;
      visited[g.idx(ni, nj)] = 1;
      stack.emplace_back(ni, nj);
      advanced = true;
      break;
    }
    if (!advanced) stack.pop_back();
  }
}

}  // namespace

std::vector<Box> generate_maze(const MazeSpec& spec) {
  Grid g(spec.cells);
  Rng rng(spec.seed);
  carve(g, rng);

  const double s = spec.cell_size;
  const double t = spec.wall_thickness;
  const double h = spec.wall_height;
  const double hz = h / 2.0;

  std::vector<Box> boxes;
  auto add_wall_x = [&](double x, double yc) {  // slab normal to x
    boxes.push_back({Vector3d(x, yc, hz), Vector3d(t / 2, s / 2 + t / 2, hz)});
  };
  auto add_wall_y = [&](double xc, double y) {  // slab normal to y
    boxes.push_back({Vector3d(xc, y, hz), Vector3d(s / 2 + t / 2, t / 2, hz)});
  };

  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const double cx = i * s;
      const double cy = j * s;
      if (i + 1 < g.n && !g.open_x[g.idx(i, j)]) add_wall_x(cx + s / 2, cy);
      if (j + 1 < g.n && !g.open_y[g.idx(i, j)]) add_wall_y(cx, cy + s / 2);
    }
  }
  // Outer boundary
  const double lo = -s / 2;
  const double hi = (g.n - 1) * s + s / 2;
  const double mid = (lo + hi) / 2;
  const double span = (hi - lo) / 2 + t;
  boxes.push_back({Vector3d(lo - t / 2, mid, hz), Vector3d(t / 2, span, hz)});
  boxes.push_back({Vector3d(hi + t / 2, mid, hz), Vector3d(t / 2, span, hz)});
  boxes.push_back({Vector3d(mid, lo - t / 2, hz), Vector3d(span, t / 2, hz)});
  boxes.push_back({Vector3d(mid, hi + t / 2, hz), Vector3d(span, t / 2, hz)});
  return boxes;
}

}  // namespace cio
