#ifndef QCFB_GRID_HPP
#define QCFB_GRID_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "qcfb/errors.hpp"

namespace qcfb {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double t, Vec2 a) { return {t * a.x, t * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Uniform Cartesian grid of cell centers; point (i,j) sits at
/// (x0 + i*s, y0 + j*s), 0 <= i < nx, 0 <= j < ny.
struct Grid2D {
    double x0 = 0.0;
    double y0 = 0.0;
    double s = 1.0;
    int nx = 0;
    int ny = 0;

    int size() const { return nx * ny; }
    int idx(int i, int j) const { return i + nx * j; }
    Vec2 at(int i, int j) const { return {x0 + i * s, y0 + j * s}; }
    bool inside(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
    bool interior(int i, int j) const { return i >= 1 && i < nx - 1 && j >= 1 && j < ny - 1; }

    /// Grid with nx x ny points spanning [xmin,xmax] x [ymin,ymax] inclusive.
    /// The spacing must match in both axes.
    static Grid2D box(double xmin, double xmax, double ymin, double ymax, int nx, int ny) {
        Grid2D g;
        g.nx = nx;
        g.ny = ny;
        g.x0 = xmin;
        g.y0 = ymin;
        g.s = (xmax - xmin) / (nx - 1);
        double sy = (ymax - ymin) / (ny - 1);
        if (std::abs(sy - g.s) > 1e-12 * std::max(1.0, std::abs(g.s)))
            throw Error(ErrorCode::InvalidSpec, "grid spacing differs between axes");
        return g;
    }
    static Grid2D square(double half, int n) { return box(-half, half, -half, half, n, n); }

    bool same_layout(const Grid2D& o) const {
        return nx == o.nx && ny == o.ny && std::abs(x0 - o.x0) < 1e-12 &&
               std::abs(y0 - o.y0) < 1e-12 && std::abs(s - o.s) < 1e-12;
    }
};

/// Cell classification for solves. Free cells carry unknowns; everything
/// else is frozen Dirichlet data.
enum class CellKind : std::uint8_t {
    Free = 0,
    Obstacle = 1,   // inside K, value 1
    Outer = 2,      // outer boundary / beyond 2*R0, value = stage floor
    Plane = 3,      // thin geometry: plane row off K, value = stage floor
};

struct ScalarField {
    Grid2D grid;
    std::vector<double> v;
    std::vector<std::uint8_t> kind;

    ScalarField() = default;
    explicit ScalarField(const Grid2D& g, double fill = 0.0)
        : grid(g), v(g.size(), fill), kind(g.size(), 0) {}

    double& at(int i, int j) { return v[grid.idx(i, j)]; }
    double at(int i, int j) const { return v[grid.idx(i, j)]; }
    CellKind kind_at(int i, int j) const { return static_cast<CellKind>(kind[grid.idx(i, j)]); }
    void set_kind(int i, int j, CellKind k) { kind[grid.idx(i, j)] = static_cast<std::uint8_t>(k); }
    bool free_at(int i, int j) const { return kind[grid.idx(i, j)] == 0; }

    double max_value() const {
        double m = -1e300;
        for (double x : v) m = std::max(m, x);
        return m;
    }
    double min_value() const {
        double m = 1e300;
        for (double x : v) m = std::min(m, x);
        return m;
    }

    /// Bilinear sample at an arbitrary point; 0 outside the grid hull.
    double sample(Vec2 p) const {
        double fx = (p.x - grid.x0) / grid.s;
        double fy = (p.y - grid.y0) / grid.s;
        if (fx < 0 || fy < 0 || fx > grid.nx - 1 || fy > grid.ny - 1) return 0.0;
        int i = std::min(static_cast<int>(fx), grid.nx - 2);
        int j = std::min(static_cast<int>(fy), grid.ny - 2);
        double ax = fx - i, ay = fy - j;
        return (1 - ax) * (1 - ay) * at(i, j) + ax * (1 - ay) * at(i + 1, j) +
               (1 - ax) * ay * at(i, j + 1) + ax * ay * at(i + 1, j + 1);
    }
};

} // namespace qcfb

#endif
