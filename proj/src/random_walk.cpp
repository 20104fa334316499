#include "tdimer/random_walk.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "tdimer/parallel.hpp"
#include "tdimer/rng.hpp"

namespace tdimer {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

// One jump of the embedded chain.
inline int step(const TGraph::Vertex& v, Rng& rng) {
    return rng.uniform() * (v.rate[0] + v.rate[1]) < v.rate[0] ? v.out[0] : v.out[1];
}

// Compact copy of the jump chain for the hot Monte Carlo loops: the same
// comparison as step(), without touching the full vertex records.
class JumpTable {
public:
    explicit JumpTable(const TGraph& t) : rows_(t.num_vertices()) {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const auto& v = t.vertex(static_cast<int>(i));
            if (v.has_out()) rows_[i] = {v.out[0], v.out[1], v.rate[0], v.rate[0] + v.rate[1]};
        }
    }
    bool has_out(int u) const { return rows_[u].up >= 0; }
    int step(int u, Rng& rng) const {
        const Row& r = rows_[u];
        return rng.uniform() * r.total < r.up_rate ? r.up : r.down;
    }

private:
    struct Row {
        int up = -1, down = -1;
        double up_rate = 0.0, total = 0.0;
    };
    std::vector<Row> rows_;
};

double wrap(double a) {
    a = std::fmod(a, kTwoPi);
    return a < 0 ? a + kTwoPi : a;
}

}  // namespace

RatePair jump_rates(const TGraph& t, DualVertex v) {
    const int idx = t.index(v);
    if (idx < 0) throw WindowError("jump_rates: vertex outside the window");
    const auto& vx = t.vertex(idx);
    if (!vx.has_out()) throw WindowError("jump_rates: containing segment outside the window");
    return {v, vx.out[0], vx.out[1], vx.rate[0], vx.rate[1]};
}

cplx drift(const TGraph& t, const RatePair& r) {
    const int idx = t.index(r.v);
    if (idx >= 0) {
        const auto& vx = t.vertex(idx);
        if (vx.has_out() && vx.out[0] == r.up && vx.out[1] == r.down) {
            return r.up_rate * vx.step[0] + r.down_rate * vx.step[1];
        }
    }
    const cplx p = t.position(r.v);
    return r.up_rate * (t.position(r.up) - p) + r.down_rate * (t.position(r.down) - p);
}

WalkPath simulate(const TGraph& t, int start, const StopRule& stop, std::uint64_t seed, std::size_t max_steps) {
    Rng rng(seed);
    WalkPath path;
    path.seed = seed;
    WalkStep cur{0.0, start};
    for (;;) {
        path.steps.push_back(cur);
        if (stop(cur)) return path;
        const auto& v = t.vertex(cur.vertex);
        if (!v.has_out()) throw WalkTruncated(std::move(path));
        if (path.steps.size() > max_steps) throw InvalidArgument("simulate: step limit reached");
        cur.time += rng.exponential(v.total_rate());
        cur.vertex = step(v, rng);
    }
}

int position_at(const TGraph& t, int start, double horizon, std::uint64_t seed) {
    Rng rng(seed);
    double time = 0.0;
    int u = start;
    for (std::size_t n = 0;; ++n) {
        const auto& v = t.vertex(u);
        if (!v.has_out()) throw TruncationError("position_at: walk reached the window boundary", n);
        time += rng.exponential(v.total_rate());
        if (time > horizon) return u;
        u = step(v, rng);
    }
}

double Proportion::estimate() const { return trials ? static_cast<double>(successes) / trials : 0.0; }

namespace {
std::pair<double, double> wilson(std::size_t k, std::size_t n) {
    if (n == 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    const double p = static_cast<double>(k) / n;
    const double z2n = z * z / n;
    const double centre = (p + z2n / 2) / (1 + z2n);
    const double half = z * std::sqrt(p * (1 - p) / n + z2n / (4.0 * n)) / (1 + z2n);
    // The bounds are exactly 0 and 1 at the ends; the formula only reaches
    // them up to rounding.
    const double lo = k == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = k == n ? 1.0 : std::min(1.0, centre + half);
    return {lo, hi};
}
}  // namespace

double Proportion::lower() const { return wilson(successes, trials).first; }
double Proportion::upper() const { return wilson(successes, trials).second; }

std::vector<cplx> direction_grid(std::size_t count) {
    std::vector<cplx> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(std::polar(1.0, kTwoPi * k / count));
    return out;
}

VarianceProfile variance_profile(const TGraph& t, std::span<const cplx> directions, std::size_t starts,
                                 std::size_t samples, std::uint64_t seed, double radius) {
    const Window& w = t.window();
    const cplx centre = t.position(DualVertex{(w.m0 + w.m1) / 2, (w.n0 + w.n1) / 2});
    std::vector<int> pool;
    for (std::size_t v = 0; v < t.num_vertices(); ++v) {
        const int i = static_cast<int>(v);
        if (t.vertex(i).has_out() && std::abs(t.position(i) - centre) <= radius) pool.push_back(i);
    }
    if (pool.empty()) throw InvalidArgument("variance_profile: no vertex near the window centre");

    VarianceProfile out;
    out.directions.assign(directions.begin(), directions.end());
    Rng pick(seed);
    for (std::size_t i = 0; i < starts; ++i) out.starts.push_back(pool[pick.below(pool.size())]);

    const std::size_t nd = directions.size();
    out.variance.assign(starts, std::vector<double>(nd, 0.0));
    std::vector<std::size_t> truncated(starts, 0);
    parallel_for(starts, [&](std::size_t i) {
        const int s = out.starts[i];
        const cplx p0 = t.position(s);
        std::vector<double> sum(nd, 0.0), sum2(nd, 0.0);
        std::size_t n = 0;
        for (std::size_t j = 0; j < samples; ++j) {
            int x;
            try {
                x = position_at(t, s, 1.0, derive_seed(seed, i * samples + j));
            } catch (const TruncationError&) {
                ++truncated[i];
                continue;
            }
            const cplx d = t.position(x) - p0;
            for (std::size_t k = 0; k < nd; ++k) {
                const double y = dot(d, directions[k]);
                sum[k] += y;
                sum2[k] += y * y;
            }
            ++n;
        }
        for (std::size_t k = 0; k < nd && n > 1; ++k) {
            const double mean = sum[k] / n;
            out.variance[i][k] = (sum2[k] - n * mean * mean) / (n - 1);
        }
    });
    out.min = HUGE_VAL;
    out.max = -HUGE_VAL;
    for (std::size_t i = 0; i < starts; ++i) {
        out.truncated += truncated[i];
        for (double v : out.variance[i]) {
            out.min = std::min(out.min, v);
            out.max = std::max(out.max, v);
        }
    }
    return out;
}

double arc_probability(std::span<const double> angles, double theta, double width) {
    if (angles.empty()) return 0.0;
    std::size_t k = 0;
    for (double a : angles) {
        if (wrap(a - theta) <= width) ++k;
    }
    return static_cast<double>(k) / angles.size();
}

double min_arc_probability(std::span<const double> angles, double width, std::size_t grid) {
    double best = 1.0;
    for (std::size_t k = 0; k < grid; ++k) best = std::min(best, arc_probability(angles, kTwoPi * k / grid, width));
    return best;
}

ExitAngleReport exit_angle_histogram(const TGraph& t, int v, double radius, std::size_t trials, std::uint64_t seed,
                                     double eta, std::size_t bins) {
    const cplx p0 = t.position(v);
    std::vector<double> angle(trials, -1.0);
    parallel_for(trials, [&](std::size_t j) {
        Rng rng(derive_seed(seed, j));
        int u = v;
        for (;;) {
            const cplx d = t.position(u) - p0;
            if (std::abs(d) > radius) {
                angle[j] = wrap(std::arg(d));
                return;
            }
            const auto& vx = t.vertex(u);
            if (!vx.has_out()) return;
            u = step(vx, rng);
        }
    });
    ExitAngleReport r;
    r.histogram.assign(bins, 0);
    for (double a : angle) {
        if (a < 0) {
            ++r.truncated;
            continue;
        }
        r.angles.push_back(a);
        r.histogram[std::min(bins - 1, static_cast<std::size_t>(a / kTwoPi * bins))]++;
    }
    r.min_arc_probability = min_arc_probability(r.angles, std::numbers::pi - eta, bins);
    return r;
}

cplx CrossingGeometry::source_centre() const {
    const cplx a(0.5, 0.5);
    const cplx b = horizontal ? cplx(2.5, 0.5) : cplx(0.5, 2.5);
    return z + (reverse ? b : a);
}

cplx CrossingGeometry::target_centre() const {
    const cplx a(0.5, 0.5);
    const cplx b = horizontal ? cplx(2.5, 0.5) : cplx(0.5, 2.5);
    return z + (reverse ? a : b);
}

cplx CrossingGeometry::lower() const { return z / delta; }
cplx CrossingGeometry::upper() const { return (z + (horizontal ? cplx(3, 1) : cplx(1, 3))) / delta; }

Window crossing_window(const TriangleShape& shape, const CrossingGeometry& g) {
    const cplx pad(4, 4);
    return window_covering(shape, g.lower() - pad, g.upper() + pad, 6);
}

CrossingEstimate crossing_probability(const TGraph& t, const CrossingGeometry& g, std::size_t trials,
                                      std::uint64_t seed, std::size_t max_starts) {
    if (!(g.delta > 0)) throw InvalidArgument("crossing: delta must be positive");
    const cplx lo = g.lower(), hi = g.upper();
    const cplx src = g.source_centre() / g.delta, dst = g.target_centre() / g.delta;
    const double ball = 0.25 / g.delta;
    auto in_rect = [&](cplx p) {
        return p.real() >= lo.real() && p.real() <= hi.real() && p.imag() >= lo.imag() && p.imag() <= hi.imag();
    };

    CrossingEstimate out;
    for (std::size_t v = 0; v < t.num_vertices(); ++v) {
        if (std::abs(t.position(static_cast<int>(v)) - src) <= ball) out.starts.push_back(static_cast<int>(v));
    }
    if (out.starts.empty()) throw InvalidArgument("crossing: no vertex in the source ball");
    if (max_starts > 0 && out.starts.size() > max_starts) {
        std::vector<int> kept;
        for (std::size_t i = 0; i < max_starts; ++i) kept.push_back(out.starts[i * out.starts.size() / max_starts]);
        out.starts = std::move(kept);
    }

    enum : char { kWalk, kHit, kExit, kTruncated };
    std::vector<char> state(t.num_vertices(), kWalk);
    for (std::size_t v = 0; v < state.size(); ++v) {
        const cplx x = t.position(static_cast<int>(v));
        if (std::abs(x - dst) <= ball) state[v] = kHit;
        else if (!in_rect(x)) state[v] = kExit;
        else if (!t.vertex(static_cast<int>(v)).has_out()) state[v] = kTruncated;
    }
    const JumpTable jumps(t);

    out.per_start.assign(out.starts.size(), {});
    std::vector<std::size_t> truncated(out.starts.size(), 0);
    parallel_for(out.starts.size(), [&](std::size_t i) {
        const int s = out.starts[i];
        const std::uint64_t base = derive_seed(seed, static_cast<std::uint64_t>(s));
        Proportion& p = out.per_start[i];
        for (std::size_t j = 0; j < trials; ++j) {
            Rng rng(derive_seed(base, j));
            int u = s;
            while (state[u] == kWalk) u = jumps.step(u, rng);
            if (state[u] == kTruncated) {
                ++truncated[i];
                continue;
            }
            ++p.trials;
            if (state[u] == kHit) ++p.successes;
        }
    });
    for (std::size_t i = 0; i < out.starts.size(); ++i) {
        out.truncated += truncated[i];
        if (out.per_start[i].estimate() < out.per_start[out.worst].estimate()) out.worst = i;
    }
    return out;
}

std::vector<double> ReturnEstimate::scaled() const {
    std::vector<double> out;
    for (std::size_t k = 0; k < radii.size(); ++k) out.push_back(escape[k].estimate() * std::log(radii[k]));
    return out;
}

ReturnEstimate return_probability(const TGraph& t, int from, int to, std::vector<double> radii, std::size_t trials,
                                  std::uint64_t seed) {
    const auto& fv = t.vertex(from);
    if (fv.out[0] != to && fv.out[1] != to) throw InvalidArgument("return_probability: not an edge");
    if (radii.empty()) throw InvalidArgument("return_probability: no radii");
    std::sort(radii.begin(), radii.end());
    const double rmax = radii.back();
    const cplx p0 = t.position(to);

    // Each trial records the farthest distance reached before returning; the
    // events for all radii are read off one walk, so they are nested.
    std::vector<double> dist(t.num_vertices());
    for (std::size_t v = 0; v < dist.size(); ++v) dist[v] = std::abs(t.position(static_cast<int>(v)) - p0);
    const JumpTable jumps(t);
    std::vector<double> reach(trials, -1.0);
    parallel_for(trials, [&](std::size_t j) {
        Rng rng(derive_seed(seed, j));
        int u = to;
        double far = 0.0;
        for (;;) {
            if (!jumps.has_out(u)) return;
            u = jumps.step(u, rng);
            if (u == to) break;
            far = std::max(far, dist[u]);
            if (far >= rmax) break;
        }
        reach[j] = far;
    });

    ReturnEstimate out;
    out.start = to;
    out.radii = radii;
    out.escape.assign(radii.size(), {});
    for (double r : reach) {
        if (r < 0) {
            ++out.truncated;
            continue;
        }
        for (std::size_t k = 0; k < radii.size(); ++k) {
            out.escape[k].trials++;
            if (r >= radii[k]) out.escape[k].successes++;
        }
    }
    return out;
}

namespace {

double ray_distance(cplx o, cplx dir, cplx p) {
    const cplx d = p - o;
    const double s = dot(d, dir);
    return s < 0 ? std::abs(d) : std::abs(cross(dir, d));
}

// +1 if the segment a -> b crosses the ray clockwise around o, -1 anticlockwise, 0 otherwise.
int ray_crossing(cplx o, cplx dir, cplx a, cplx b) {
    const double ca = cross(dir, a - o), cb = cross(dir, b - o);
    if ((ca > 0) == (cb > 0) || ca == 0 || cb == 0) return 0;
    // Intersection with the supporting line must lie ahead of o.
    const double s = ca / (ca - cb);
    const cplx x = a + s * (b - a);
    if (dot(x - o, dir) <= 0) return 0;
    return cross(a - o, b - o) < 0 ? 1 : -1;
}

}  // namespace

double cut_argument(const CutGreenSpec& spec, cplx p) { return wrap(std::arg(p - spec.origin) - spec.direction); }

CutGreenSpec make_cut_spec(const TGraph& t, int face, double direction, double radius) {
    const auto& f = t.face(face);
    cplx o = 0;
    for (int c : f.corner) o += t.position(c) / 3.0;
    for (int k = 0; k < 2000; ++k) {
        const double a = direction + (k % 2 ? -1 : 1) * ((k + 1) / 2) * 1e-3;
        const cplx dir = std::polar(1.0, a);
        bool clear = true;
        for (std::size_t v = 0; v < t.num_vertices() && clear; ++v) {
            const cplx p = t.position(static_cast<int>(v));
            if (std::abs(p - o) <= radius + 2 && ray_distance(o, dir, p) < 1e-6) clear = false;
        }
        if (clear) return {face, o, wrap(a), radius};
    }
    throw InvalidArgument("make_cut_spec: no clear direction");
}

CutGreenSolution solve_cut_green(const TGraph& t, const CutGreenSpec& spec) {
    const cplx o = spec.origin;
    const cplx dir = std::polar(1.0, spec.direction);
    CutGreenSolution s;
    s.spec = spec;

    const std::size_t n = t.num_vertices();
    std::vector<int> local(n, -1);
    for (std::size_t v = 0; v < n; ++v) {
        const int i = static_cast<int>(v);
        if (std::abs(t.position(i) - o) > spec.radius) continue;
        if (!t.vertex(i).has_out()) throw WindowError("solve_cut_green: truncation disc leaves the window");
        local[v] = static_cast<int>(s.vertices.size());
        s.vertices.push_back(i);
    }
    s.interior = s.vertices.size();
    if (s.interior == 0) throw InvalidArgument("solve_cut_green: empty truncation disc");
    for (std::size_t k = 0; k < s.interior; ++k) {
        for (int y : t.vertex(s.vertices[k]).out) {
            if (local[y] < 0) {
                local[y] = static_cast<int>(s.vertices.size());
                s.vertices.push_back(y);
            }
        }
    }
    s.value.assign(s.vertices.size(), 0.0);
    for (std::size_t k = s.interior; k < s.vertices.size(); ++k) {
        s.value[k] = cut_argument(spec, t.position(s.vertices[k])) / kTwoPi;
    }

    const auto m = static_cast<Eigen::Index>(s.interior);
    std::vector<Eigen::Triplet<double>> entries;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    s.cut_adjacent.assign(s.interior, 0);
    std::vector<double> source(s.interior, 0.0);
    for (std::size_t k = 0; k < s.interior; ++k) {
        const int x = s.vertices[k];
        const auto& vx = t.vertex(x);
        const auto row = static_cast<Eigen::Index>(k);
        entries.emplace_back(row, row, -vx.total_rate());
        for (int e = 0; e < 2; ++e) {
            const int y = vx.out[e];
            const int c = ray_crossing(o, dir, t.position(x), t.position(y));
            if (c != 0) {
                s.cut_adjacent[k] = 1;
                source[k] += c * vx.rate[e];
            }
            const auto col = static_cast<std::size_t>(local[y]);
            if (col < s.interior) {
                entries.emplace_back(row, static_cast<Eigen::Index>(col), vx.rate[e]);
            } else {
                rhs[row] -= vx.rate[e] * s.value[col];
            }
        }
        rhs[row] += source[k];
    }
    Eigen::SparseMatrix<double> a(m, m);
    a.setFromTriplets(entries.begin(), entries.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw NumericError("solve_cut_green: factorisation failed", HUGE_VAL);
    const Eigen::VectorXd f = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw NumericError("solve_cut_green: solve failed", HUGE_VAL);
    for (std::size_t k = 0; k < s.interior; ++k) s.value[k] = f[static_cast<Eigen::Index>(k)];

    for (std::size_t k = 0; k < s.interior; ++k) {
        const auto& vx = t.vertex(s.vertices[k]);
        double lhs = 0.0;
        for (int e = 0; e < 2; ++e) lhs += vx.rate[e] * (s.value[local[vx.out[e]]] - s.value[k]);
        s.max_residual = std::max(s.max_residual, std::abs(lhs - source[k]));
    }
    if (!(s.max_residual < 1e-8)) throw NumericError("solve_cut_green: residual too large", s.max_residual);
    return s;
}

double fit_log_coefficient(const TGraph& t, const CutGreenSolution& s, double r0, double r1) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < s.interior; ++k) {
        const cplx p = t.position(s.vertices[k]);
        const double r = std::abs(p - s.spec.origin);
        if (r < r0 || r > r1) continue;
        const double x = std::log(r) / kTwoPi;
        const double y = s.value[k] - cut_argument(s.spec, p) / kTwoPi;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 3) throw InvalidArgument("fit_log_coefficient: too few vertices in the annulus");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double closed_form_log_coefficient(const TGraph& t, int face) {
    const HexVertex w = t.face(face).white;
    return std::tan(white_phase(t.shape(), t.twist(), w.m, w.n));
}

double predicted_log_coefficient(const TGraph& t, int face) {
    // The closed form is written for the mirror image of our drawing; a
    // reflection flips arg and hence the relative sign of the log term.
    return -closed_form_log_coefficient(t, face);
}

}  // namespace tdimer
