#include <algorithm>
#include <cmath>

#include "kan3/ergodic.hpp"
#include "kan3/parallel.hpp"

namespace kan3 {

const char* to_string(CoverageObject o) {
  switch (o) {
    case CoverageObject::ForwardFiberP: return "forward_fiber_p";
    case CoverageObject::ForwardUDiskP: return "forward_udisk_p";
    case CoverageObject::BackwardFiberQ: return "backward_fiber_q";
    case CoverageObject::BackwardStableP: return "backward_stable_p";
  }
  return "unknown";
}

std::size_t coverage_cell(const CoverageSpec& s, const Point3& p) {
  auto idx = [](double u, int n) {
    int k = static_cast<int>(u * n);
    return static_cast<std::size_t>(std::clamp(k, 0, n - 1));
  };
  const std::size_t i = idx(p.base.x, s.nx);
  const std::size_t j = idx(p.base.y, s.ny);
  const std::size_t k = idx((p.theta + 1.0) * 0.5, s.nth);
  return (i * s.ny + j) * s.nth + k;
}

namespace {

struct Seed {
  TorusPoint2 origin;
  Vec2 dir;
  bool fiber = false;  // full theta circle, else the single level 1/2
  bool forward = true;
};

Seed seed_of(const SkewMap& f, CoverageObject o) {
  const AnosovMap& a = f.base();
  switch (o) {
    case CoverageObject::ForwardFiberP: return {a.p(), a.e_u(), true, true};
    case CoverageObject::ForwardUDiskP: return {a.p(), a.e_u(), false, true};
    case CoverageObject::BackwardFiberQ: return {a.q(), a.e_s(), true, false};
    case CoverageObject::BackwardStableP: return {a.p(), a.e_s(), false, false};
  }
  throw Error(ErrorKind::InvalidArgument, "unknown coverage object");
}

// Displacement in cell units, max over the three axes.
double cell_gap(const CoverageSpec& s, const Point3& a, const Point3& b) {
  Vec2 d = torus_delta(a.base, b.base);
  double g = std::max(std::fabs(d.x) * s.nx, std::fabs(d.y) * s.ny);
  return std::max(g, theta_distance(a.theta, b.theta) * 0.5 * s.nth);
}

class Surface {
 public:
  Surface(const SkewMap& f, const Seed& seed, const CoverageSpec& spec, int threads)
      : f_(f), seed_(seed), spec_(spec), threads_(threads) {}

  void init() {
    s_ = spec_.L > 0.0 ? std::vector<double>{-spec_.L, 0.0, spec_.L} : std::vector<double>{0.0};
    if (seed_.fiber) {
      const int n = 4 * spec_.nth;
      for (int k = 0; k < n; ++k) th_.push_back(-1.0 + 2.0 * k / n);
    } else {
      th_ = {0.5};
    }
    img_.assign(s_.size(), std::vector<Point3>(th_.size()));
    for (std::size_t i = 0; i < s_.size(); ++i)
      for (std::size_t j = 0; j < th_.size(); ++j) img_[i][j] = image(s_[i], th_[j]);
  }

  void advance() {
    ++depth_;
    parallel_for(img_.size(), threads_, [&](std::size_t i) {
      for (auto& p : img_[i]) p = step(p);
    });
  }

  // Midpoint insertion until every neighbouring pair is within half a cell.
  // Returns false when the budget stops refinement.
  bool refine() {
    for (;;) {
      bool changed = false;
      if (s_.size() > 1) {
        std::vector<std::size_t> split;
        for (std::size_t i = 0; i + 1 < s_.size(); ++i)
          for (std::size_t j = 0; j < th_.size(); ++j)
            if (cell_gap(spec_, img_[i][j], img_[i + 1][j]) > 0.5) {
              split.push_back(i);
              break;
            }
        if (!split.empty()) {
          if (!fits(split.size() * th_.size())) return false;
          insert_s(split);
          changed = true;
        }
      }
      if (seed_.fiber) {
        std::vector<std::size_t> split;
        for (std::size_t j = 0; j < th_.size(); ++j) {
          std::size_t jn = (j + 1) % th_.size();
          for (std::size_t i = 0; i < s_.size(); ++i)
            if (cell_gap(spec_, img_[i][j], img_[i][jn]) > 0.5) {
              split.push_back(j);
              break;
            }
        }
        if (!split.empty()) {
          if (!fits(split.size() * s_.size())) return false;
          insert_theta(split);
          changed = true;
        }
      }
      if (!changed) return true;
    }
  }

  void mark(std::vector<std::uint8_t>& hit) const {
    for (const auto& row : img_)
      for (const auto& p : row) hit[coverage_cell(spec_, p)] = 1;
  }

  long points() const { return static_cast<long>(s_.size() * th_.size()); }

 private:
  Point3 step(const Point3& p) const { return seed_.forward ? f_.apply(p) : f_.apply_inverse(p); }

  Point3 image(double s, double th) const {
    Point3 p{translate(seed_.origin, s * seed_.dir), wrap_theta(th)};
    for (int k = 0; k < depth_; ++k) p = step(p);
    return p;
  }

  bool fits(std::size_t extra) const {
    return static_cast<long>(s_.size() * th_.size() + extra) <= spec_.budget;
  }

  void insert_s(const std::vector<std::size_t>& split) {
    std::vector<double> mids(split.size());
    for (std::size_t k = 0; k < split.size(); ++k) mids[k] = 0.5 * (s_[split[k]] + s_[split[k] + 1]);
    std::vector<std::vector<Point3>> rows(split.size(), std::vector<Point3>(th_.size()));
    parallel_for(split.size(), threads_, [&](std::size_t k) {
      for (std::size_t j = 0; j < th_.size(); ++j) rows[k][j] = image(mids[k], th_[j]);
    });
    std::vector<double> s2;
    std::vector<std::vector<Point3>> img2;
    s2.reserve(s_.size() + split.size());
    img2.reserve(s_.size() + split.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < s_.size(); ++i) {
      s2.push_back(s_[i]);
      img2.push_back(std::move(img_[i]));
      if (k < split.size() && split[k] == i) {
        s2.push_back(mids[k]);
        img2.push_back(std::move(rows[k]));
        ++k;
      }
    }
    s_ = std::move(s2);
    img_ = std::move(img2);
  }

  void insert_theta(const std::vector<std::size_t>& split) {
    std::vector<double> mids(split.size());
    for (std::size_t k = 0; k < split.size(); ++k) {
      std::size_t j = split[k];
      double a = th_[j];
      double b = j + 1 < th_.size() ? th_[j + 1] : th_[0] + 2.0;
      mids[k] = 0.5 * (a + b);
    }
    std::vector<std::vector<Point3>> cols(s_.size(), std::vector<Point3>(split.size()));
    parallel_for(s_.size(), threads_, [&](std::size_t i) {
      for (std::size_t k = 0; k < split.size(); ++k) cols[i][k] = image(s_[i], mids[k]);
    });
    std::vector<double> th2;
    th2.reserve(th_.size() + split.size());
    for (std::size_t j = 0, k = 0; j < th_.size(); ++j) {
      th2.push_back(th_[j]);
      if (k < split.size() && split[k] == j) th2.push_back(mids[k++]);
    }
    for (std::size_t i = 0; i < s_.size(); ++i) {
      std::vector<Point3> row;
      row.reserve(th2.size());
      for (std::size_t j = 0, k = 0; j < th_.size(); ++j) {
        row.push_back(img_[i][j]);
        if (k < split.size() && split[k] == j) row.push_back(cols[i][k++]);
      }
      img_[i] = std::move(row);
    }
    th_ = std::move(th2);
  }

  const SkewMap& f_;
  Seed seed_;
  CoverageSpec spec_;
  int threads_;
  int depth_ = 0;
  std::vector<double> s_, th_;
  std::vector<std::vector<Point3>> img_;
};

}  // namespace

CoverageReport manifold_coverage(const SkewMap& f, CoverageObject object, int depth, const CoverageSpec& spec,
                                 int threads) {
  if (depth < 0) throw Error(ErrorKind::InvalidArgument, "depth must be >= 0");
  if (spec.nx < 1 || spec.ny < 1 || spec.nth < 1 || spec.L < 0.0 || spec.budget < 1)
    throw Error(ErrorKind::InvalidArgument, "bad coverage grid");
  CoverageReport rep;
  rep.object = object;
  rep.spec = spec;
  const std::size_t cells = static_cast<std::size_t>(spec.nx) * spec.ny * spec.nth;
  rep.hit.assign(cells, 0);

  Surface surf(f, seed_of(f, object), spec, resolve_threads(threads));
  surf.init();
  auto account = [&](int d) {
    if (!surf.refine()) rep.budget_exhausted = true;
    surf.mark(rep.hit);
    rep.points_used = std::max(rep.points_used, surf.points());
    rep.depth = d;
    auto n = static_cast<std::size_t>(std::count(rep.hit.begin(), rep.hit.end(), 1));
    rep.fraction = static_cast<double>(n) / static_cast<double>(cells);
    if (n == cells && rep.depth_full < 0) rep.depth_full = d;
  };
  account(0);
  for (int d = 1; d <= depth && rep.depth_full < 0 && !rep.budget_exhausted; ++d) {
    surf.advance();
    account(d);
  }
  return rep;
}

}  // namespace kan3
