#ifndef QCFB_GEOMETRY_HPP
#define QCFB_GEOMETRY_HPP

#include <vector>

#include "qcfb/grid.hpp"

namespace qcfb {

/// Compact convex polytope. For dim == 2 the vertex list is the hull boundary,
/// counterclockwise and strictly convex. For dim == 1 the body is a segment in
/// the line {y = const} stored as its two endpoints.
struct ConvexBody {
    std::vector<Vec2> vertices;
    int dim = 2;

    bool contains(Vec2 p, double tol = 1e-12) const;
};

/// Raster subset of a grid: one membership flag per cell.
struct CellSet {
    Grid2D grid;
    std::vector<std::uint8_t> member;

    CellSet() = default;
    explicit CellSet(const Grid2D& g) : grid(g), member(g.size(), 0) {}
    bool at(int i, int j) const { return member[grid.idx(i, j)] != 0; }
    void set(int i, int j, bool m = true) { member[grid.idx(i, j)] = m ? 1 : 0; }
    long count() const {
        long c = 0;
        for (auto m : member) c += m;
        return c;
    }
    bool empty() const { return count() == 0; }
};

/// Convex hull of a point cloud (full-dimensional request for dim=2).
/// Throws DegenerateBody if the hull has empty interior for dim=2, or fewer
/// than two distinct points for dim=1.
ConvexBody make_body(const std::vector<Vec2>& points, int dim = 2);

/// Regular n-gon inscribed in the circle of radius r about the origin.
ConvexBody regular_polygon(int n, double r);

/// Segment [-halfwidth, halfwidth] x {y} as a dim-1 body.
ConvexBody segment_body(double halfwidth, double y = 0.0);

/// Euclidean distance to the body as a set (0 inside).
double distance(const ConvexBody& body, Vec2 x);

/// Signed area (shoelace); 0 for dim-1 bodies.
double area(const ConvexBody& body);

/// Inradius: sup of tau with nonempty inner parallel body; for segments the
/// relative inradius (half length).
double inradius(const ConvexBody& body);

/// Inner parallel body {x in K : dist(x, boundary K) >= tau}, computed by
/// offsetting each edge inward and re-intersecting half-planes; for segments
/// the relative inset. Throws EmptyInset when tau reaches the inradius.
ConvexBody inset(const ConvexBody& body, double tau);

/// For a dim-1 body in {y=0}: relative inset by tau translated to {y=-tau}.
/// Every x in the line outside K then satisfies distance(result, x) >= sqrt(2)*tau.
ConvexBody tilt_translate(const ConvexBody& body, double tau);

/// Cells with value >= l. Empty result allowed.
CellSet superlevel(const ScalarField& field, double l);

/// Convex hull of cell centers of a nonempty cell set.
ConvexBody hull_of(const CellSet& cells);

/// Rasterize a body on a grid by cell-center membership.
CellSet rasterize(const ConvexBody& body, const Grid2D& grid);

/// (hull raster count - cell count)/cell count for the super-level set at l.
/// Throws EmptyLevel when the level set is empty.
double convexity_defect(const ScalarField& field, double l);

/// Run-length encoding of a cell set, one list of [start, len) column runs per row.
std::vector<std::vector<std::pair<int, int>>> rle_rows(const CellSet& cells);

} // namespace qcfb

#endif
