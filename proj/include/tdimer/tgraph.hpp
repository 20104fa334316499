#pragma once

// T-graph of the hexagonal lattice: the image of the dual triangular lattice
// under the primitive psi of the rotated flow. Black faces become segments,
// white faces become similar copies of the reference triangle.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tdimer/hex_lattice.hpp"

namespace tdimer {

/// Triangle with angles (pi p_a, pi p_b, pi p_c) at A, B, C and circumdiameter 1.
/// Side vectors: alpha = C - B, beta = A - C, gamma = B - A.
struct TriangleShape {
    double pa = 0, pb = 0, pc = 0;
    cplx A, B, C;
    cplx alpha, beta, gamma;

    std::array<double, 3> probabilities() const { return {pa, pb, pc}; }
    /// Lozenge densities by edge class (vertical, NE-SW, NW-SE) of the
    /// resulting tilings: the angles at B, C and A.
    std::array<double, 3> lozenge_densities() const { return {pb, pc, pa}; }
};

TriangleShape build_triangle(double pa, double pb, double pc);

/// Triangle whose tilings have densities (vertical, NE-SW, NW-SE) = (pa, pb, pc).
inline TriangleShape triangle_for_slope(double pa, double pb, double pc) { return build_triangle(pc, pa, pb); }

/// Unit-modulus twist. The angle is the primary representation; lambda is
/// derived from it so that large translations do not accumulate drift.
class Twist {
public:
    Twist() = default;
    static Twist from_angle(double radians);
    static Twist from_turns(double turns);
    /// Accepts any non-zero complex number and keeps only its argument.
    static Twist from_complex(cplx z);

    double angle() const { return angle_; }
    double turns() const;
    cplx lambda() const;

private:
    double angle_ = 0.0;  // in [0, 2 pi)
};

/// Phase of the white face at (m, n): arg(lambda) + m arg(beta/gamma) + n arg(beta/alpha).
double white_phase(const TriangleShape& shape, const Twist& twist, int m, int n);

/// phi(wb) for adjacent w, b (either order; flow(b,w) = -flow(w,b)).
cplx flow(HexVertex a, HexVertex b, const TriangleShape& shape, const Twist& twist);

/// The twist whose T-graph, rooted at F(0,0), is the original one re-rooted at F(m,n).
Twist translate_twist(const Twist& twist, int m, int n, const TriangleShape& shape);

/// Affine approximation of psi at coordinates (m, n).
cplx linear_approx(const TriangleShape& shape, double m, double n);

/// Lattice window whose affine image covers the box [lo, hi] (T-graph units),
/// widened by `margin` lattice steps on every side.
Window window_covering(const TriangleShape& shape, cplx lo, cplx hi, int margin = 4);

struct BuildOptions {
    /// Relative linear size below which a white face counts as collapsed.
    double degeneracy_eps = 1e-8;
    /// When false, degenerate faces are kept (and reported by check_nondegenerate)
    /// instead of raising DegeneracyError.
    bool strict = true;
};

class TGraph {
public:
    struct Vertex {
        DualVertex coord;
        cplx pos;
        /// Index of the segment containing this vertex in its interior, or -1
        /// if that black face lies outside the window (or is degenerate).
        int segment = -1;
        std::array<int, 2> out{-1, -1};
        std::array<double, 2> rate{0.0, 0.0};
        /// Displacement to out[k], taken from the face flows around the black
        /// face rather than from differences of absolute positions.
        std::array<cplx, 2> step{};

        bool has_out() const { return segment >= 0; }
        double total_rate() const { return rate[0] + rate[1]; }
    };

    struct Segment {
        HexVertex black;
        /// Corners in the order (F(m,n), F(m-1,n+1), F(m,n+1)).
        std::array<int, 3> corner{-1, -1, -1};
        /// Position in `corner` of the interior vertex, or -1 if degenerate.
        int interior = -1;

        int interior_vertex() const { return interior < 0 ? -1 : corner[interior]; }
        std::array<int, 2> endpoints() const {
            return {corner[(interior + 1) % 3], corner[(interior + 2) % 3]};
        }
    };

    struct Face {
        HexVertex white;
        /// Anticlockwise corners (F(m-1,n), F(m,n), F(m-1,n+1)), the images of
        /// the reference triangle's B, C, A.
        std::array<int, 3> corner{-1, -1, -1};
    };

    TGraph(const TriangleShape& shape, const Twist& twist, const Window& window,
           const BuildOptions& options = {});

    const TriangleShape& shape() const { return shape_; }
    const Twist& twist() const { return twist_; }
    const Window& window() const { return window_; }
    /// Coordinate rectangle of the black and white faces with all corners in the window.
    const Window& face_window() const { return face_window_; }

    std::size_t num_vertices() const { return vertices_.size(); }
    std::span<const Vertex> vertices() const { return vertices_; }
    const Vertex& vertex(int idx) const { return vertices_[idx]; }
    int index(DualVertex v) const { return window_.index(v); }
    cplx position(int idx) const { return vertices_[idx].pos; }
    cplx position(DualVertex v) const;

    std::span<const Segment> segments() const { return segments_; }
    std::span<const Face> faces() const { return faces_; }
    /// Index of the segment / face of a black / white hex vertex, or -1.
    int segment_index(HexVertex black) const;
    int face_index(HexVertex white) const;
    const Segment& segment(int idx) const { return segments_[idx]; }
    const Face& face(int idx) const { return faces_[idx]; }

    /// Dual vertices whose interior segment is degenerate (only when built non-strict).
    std::span<const int> degenerate_faces() const { return degenerate_faces_; }

    /// Total number of directed edges (two per vertex with out-edges).
    std::size_t num_edges() const;

    /// Mean segment length over the window.
    double mean_segment_length() const { return mean_segment_length_; }

private:
    TriangleShape shape_;
    Twist twist_;
    Window window_;
    Window face_window_;
    std::vector<Vertex> vertices_;
    std::vector<Segment> segments_;
    std::vector<Face> faces_;
    std::vector<int> degenerate_faces_;
    double mean_segment_length_ = 0.0;
};

/// Convenience wrapper matching the constructor.
TGraph build_tgraph(const TriangleShape& shape, const Twist& twist, const Window& window,
                    const BuildOptions& options = {});

struct NondegeneracyReport {
    bool ok = true;
    double min_face_scale = 0.0;  // shortest white-face side / mean segment length
    double min_segment = 0.0;
    double max_segment = 0.0;
    double max_collinearity = 0.0;  // |cross| / length^2 over black faces
    std::vector<HexVertex> collapsed_faces;
    /// Dual vertices (with all three black faces in the window) not interior to exactly one.
    std::vector<DualVertex> bad_vertices;
};

NondegeneracyReport check_nondegenerate(const TGraph& t, double eps = 1e-8);

/// Dual flow on the oriented H-dagger edge x -> y: +phi(wb) when the
/// crossing leaves the white endpoint on the left, -phi(wb) otherwise.
cplx dual_flow(DualVertex x, DualVertex y, const TriangleShape& shape, const Twist& twist);

struct GeometryReport {
    /// |sum of the dual flow around a triangle of H-dagger|, over the window.
    double max_circulation = 0.0;
    /// |psi(y) - psi(x) - dual_flow(x, y)| over adjacent window vertices.
    double max_primitive_error = 0.0;
    double max_collinearity = 0.0;
    /// Largest deviation of a white face angle from pi p at the matching corner.
    double max_angle_error = 0.0;
    std::size_t negatively_oriented = 0;
    /// Vertices whose three black faces are in the window; a vertex is bad
    /// unless it is interior to exactly one of them and an endpoint of the other two.
    std::size_t vertices_checked = 0;
    std::size_t bad_incidence = 0;
    /// sup |psi(F(m,n)) - linear_approx(m, n)| over the window.
    double linear_gap = 0.0;
};

GeometryReport check_geometry(const TGraph& t);

/// Regular-looking embedding of H: white vertices at face centroids, black
/// vertices at the interior point of their segment. Only hex vertices whose
/// face lies in the window are returned.
struct HexEmbedding {
    std::vector<std::pair<HexVertex, cplx>> white;
    std::vector<std::pair<HexVertex, cplx>> black;
};
HexEmbedding embed_hex(const TGraph& t);

/// Geometric helpers shared by the analysis modules.
inline double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

}  // namespace tdimer
