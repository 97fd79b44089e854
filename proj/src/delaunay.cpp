#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace monodtn::detail {
namespace {

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nb;  // nb[i] is across the edge opposite v[i]
  bool alive = true;
};

double orient(const Point& a, const Point& b, const Point& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// Positive when d lies inside the circumcircle of the CCW triangle abc.
double incircle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
         ad * (bdx * cdy - bdy * cdx);
}

class Triangulator {
 public:
  explicit Triangulator(std::span<const Point> input) : pts_(input.begin(), input.end()) {
    double xmin = pts_[0].x, xmax = xmin, ymin = pts_[0].y, ymax = ymin;
    for (const auto& p : pts_) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-300});
    n_input_ = static_cast<int>(pts_.size());
    pts_.push_back({cx - 1e4 * span, cy - 1e4 * span});
    pts_.push_back({cx + 1e4 * span, cy - 1e4 * span});
    pts_.push_back({cx, cy + 1e4 * span});
    tris_.push_back({{n_input_, n_input_ + 1, n_input_ + 2}, {-1, -1, -1}});
  }

  void insert(int pi) {
    const Point& p = pts_[pi];
    const int start = locate(p);

    // Grow the cavity of triangles whose circumcircle contains p.
    cavity_.clear();
    stack_.clear();
    stack_.push_back(start);
    tris_[start].alive = false;
    while (!stack_.empty()) {
      const int t = stack_.back();
      stack_.pop_back();
      cavity_.push_back(t);
      for (int k = 0; k < 3; ++k) {
        const int n = tris_[t].nb[k];
        if (n < 0 || !tris_[n].alive) continue;
        const auto& v = tris_[n].v;
        if (incircle(pts_[v[0]], pts_[v[1]], pts_[v[2]], p) > 0.0) {
          tris_[n].alive = false;
          stack_.push_back(n);
        }
      }
    }

    // Retriangulate the cavity boundary as a fan around p.
    starts_.clear();
    const int first_new = static_cast<int>(tris_.size());
    for (int t : cavity_) {
      for (int k = 0; k < 3; ++k) {
        const int n = tris_[t].nb[k];
        if (n >= 0 && !tris_[n].alive) continue;
        const int a = tris_[t].v[(k + 1) % 3];
        const int b = tris_[t].v[(k + 2) % 3];
        const int idx = static_cast<int>(tris_.size());
        // New triangle (a, b, p): edge ab is opposite p.
        tris_.push_back({{a, b, pi}, {-1, -1, n}});
        if (n >= 0) {
          for (int j = 0; j < 3; ++j) {
            if (tris_[n].nb[j] == t) tris_[n].nb[j] = idx;
          }
        }
        starts_[a] = idx;
      }
    }
    // Edge (b, p) of (a, b, p) borders the fan triangle starting at b, whose
    // edge (p, b) borders back.
    for (int idx = first_new; idx < static_cast<int>(tris_.size()); ++idx) {
      tris_[idx].nb[0] = starts_.at(tris_[idx].v[1]);
    }
    for (int idx = first_new; idx < static_cast<int>(tris_.size()); ++idx) {
      const int nb0 = tris_[idx].nb[0];
      tris_[nb0].nb[1] = idx;
    }
    last_ = first_new;
  }

  std::vector<std::array<int, 3>> result() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= n_input_ || t.v[1] >= n_input_ || t.v[2] >= n_input_) continue;
      out.push_back(t.v);
    }
    return out;
  }

 private:
  int locate(const Point& p) {
    int t = last_;
    while (!tris_[t].alive) --t;
    for (std::size_t guard = 0; guard < 4 * tris_.size() + 16; ++guard) {
      const auto& tri = tris_[t];
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int a = tri.v[(k + 1) % 3];
        const int b = tri.v[(k + 2) % 3];
        if (orient(pts_[a], pts_[b], p) < 0.0 && tri.nb[k] >= 0) {
          t = tri.nb[k];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
    // Walk cycled on a degenerate configuration; fall back to a scan.
    for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i) {
      if (!tris_[i].alive) continue;
      const auto& v = tris_[i].v;
      if (orient(pts_[v[0]], pts_[v[1]], p) >= 0.0 && orient(pts_[v[1]], pts_[v[2]], p) >= 0.0 &&
          orient(pts_[v[2]], pts_[v[0]], p) >= 0.0) {
        return i;
      }
    }
    throw std::runtime_error("delaunay: point location failed");
  }

  std::vector<Point> pts_;
  std::vector<Tri> tris_;
  int n_input_ = 0;
  int last_ = 0;
  std::vector<int> cavity_;
  std::vector<int> stack_;
  std::unordered_map<int, int> starts_;
};

}  // namespace

std::vector<std::array<int, 3>> delaunay_triangulate(std::span<const Point> points) {
  if (points.size() < 3) throw std::invalid_argument("delaunay: need at least 3 points");
  Triangulator tri(points);
  for (int i = 0; i < static_cast<int>(points.size()); ++i) tri.insert(i);
  return tri.result();
}

}  // namespace monodtn::detail
