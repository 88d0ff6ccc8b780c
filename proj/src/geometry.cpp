#include "qcfb/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace qcfb {

namespace {

// Andrew monotone chain; returns CCW hull without repeated endpoint.
std::vector<Vec2> hull_points(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    int n = static_cast<int>(pts.size());
    if (n < 3) return pts;
    std::vector<Vec2> h(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    int lower = k + 1;
    for (int i = n - 2; i >= 0; --i) {
        while (k >= lower && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

double point_segment_dist(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 == 0) return norm(p - a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

// Clip a polygon by the half-plane {x : n.x <= c} (Sutherland-Hodgman).
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, Vec2 nrm, double c) {
    std::vector<Vec2> out;
    int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i) {
        Vec2 a = poly[i], b = poly[(i + 1) % n];
        double da = dot(nrm, a) - c, db = dot(nrm, b) - c;
        if (da <= 0) out.push_back(a);
        if ((da < 0 && db > 0) || (da > 0 && db < 0)) {
            double t = da / (da - db);
            out.push_back(a + t * (b - a));
        }
    }
    return out;
}

} // namespace

bool ConvexBody::contains(Vec2 p, double tol) const {
    if (dim == 1) {
        if (vertices.size() < 2) return false;
        Vec2 a = vertices[0], b = vertices[1];
        return point_segment_dist(p, a, b) <= tol + 1e-300;
    }
    int n = static_cast<int>(vertices.size());
    for (int i = 0; i < n; ++i) {
        Vec2 a = vertices[i], b = vertices[(i + 1) % n];
        if (cross(b - a, p - a) < -tol) return false;
    }
    return true;
}

ConvexBody make_body(const std::vector<Vec2>& points, int dim) {
    if (points.empty()) throw Error(ErrorCode::EmptyInput, "no points");
    if (dim == 1) {
        // All points must be collinear on a horizontal line; keep the extremes.
        double y = points[0].y;
        double xmin = points[0].x, xmax = points[0].x;
        for (Vec2 p : points) {
            if (std::abs(p.y - y) > 1e-12)
                throw Error(ErrorCode::DegenerateBody, "dim-1 body not in a horizontal line");
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
        }
        if (xmax - xmin <= 0)
            throw Error(ErrorCode::DegenerateBody, "dim-1 body has empty relative interior");
        ConvexBody b;
        b.dim = 1;
        b.vertices = {{xmin, y}, {xmax, y}};
        return b;
    }
    auto h = hull_points(points);
    if (h.size() < 3) throw Error(ErrorCode::DegenerateBody, "hull has empty interior");
    ConvexBody b;
    b.dim = 2;
    b.vertices = std::move(h);
    return b;
}

ConvexBody regular_polygon(int n, double r) {
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (int k = 0; k < n; ++k) {
        double th = 2.0 * M_PI * k / n;
        pts.push_back({r * std::cos(th), r * std::sin(th)});
    }
    return make_body(pts, 2);
}

ConvexBody segment_body(double halfwidth, double y) {
    return make_body({{-halfwidth, y}, {halfwidth, y}}, 1);
}

double distance(const ConvexBody& body, Vec2 x) {
    if (body.dim == 1) return point_segment_dist(x, body.vertices[0], body.vertices[1]);
    if (body.contains(x)) return 0.0;
    double d = 1e300;
    int n = static_cast<int>(body.vertices.size());
    for (int i = 0; i < n; ++i)
        d = std::min(d, point_segment_dist(x, body.vertices[i], body.vertices[(i + 1) % n]));
    return d;
}

double area(const ConvexBody& body) {
    if (body.dim == 1) return 0.0;
    double a = 0;
    int n = static_cast<int>(body.vertices.size());
    for (int i = 0; i < n; ++i) a += cross(body.vertices[i], body.vertices[(i + 1) % n]);
    return 0.5 * a;
}

ConvexBody inset(const ConvexBody& body, double tau) {
    if (tau < 0) throw Error(ErrorCode::InvalidSpec, "negative inset depth");
    if (body.dim == 1) {
        Vec2 a = body.vertices[0], b = body.vertices[1];
        double half = 0.5 * norm(b - a);
        if (tau >= half) throw Error(ErrorCode::EmptyInset, "inset depth reaches relative inradius");
        Vec2 mid = 0.5 * (a + b);
        Vec2 dir = (1.0 / (2 * half)) * (b - a);
        ConvexBody r;
        r.dim = 1;
        r.vertices = {mid - (half - tau) * dir, mid + (half - tau) * dir};
        return r;
    }
    if (tau == 0) return body;
    std::vector<Vec2> poly = body.vertices;
    int n = static_cast<int>(body.vertices.size());
    for (int i = 0; i < n; ++i) {
        Vec2 a = body.vertices[i], b = body.vertices[(i + 1) % n];
        Vec2 e = b - a;
        Vec2 nrm = {e.y / norm(e), -e.x / norm(e)}; // outward for CCW
        double c = dot(nrm, a) - tau;
        poly = clip_halfplane(poly, nrm, c);
        if (poly.size() < 3) throw Error(ErrorCode::EmptyInset, "inset depth reaches inradius");
    }
    auto h = hull_points(poly); // drop orientation-inverting leftovers
    if (h.size() < 3) throw Error(ErrorCode::EmptyInset, "inset depth reaches inradius");
    ConvexBody r;
    r.dim = 2;
    r.vertices = std::move(h);
    return r;
}

double inradius(const ConvexBody& body) {
    if (body.dim == 1) return 0.5 * norm(body.vertices[1] - body.vertices[0]);
    double lo = 0.0, hi = 0.0;
    for (Vec2 v : body.vertices) hi = std::max(hi, norm(v));
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        try {
            inset(body, mid);
            lo = mid;
        } catch (const Error&) {
            hi = mid;
        }
    }
    return lo;
}

ConvexBody tilt_translate(const ConvexBody& body, double tau) {
    if (body.dim != 1)
        throw Error(ErrorCode::InvalidSpec, "tilt_translate expects a body in the hyperplane");
    if (tau <= 0) throw Error(ErrorCode::InvalidSpec, "tilt depth must be positive");
    ConvexBody in = inset(body, tau);
    for (Vec2& v : in.vertices) v.y -= tau;
    return in;
}

CellSet superlevel(const ScalarField& field, double l) {
    CellSet out(field.grid);
    int n = field.grid.size();
    for (int k = 0; k < n; ++k) out.member[k] = field.v[k] >= l ? 1 : 0;
    return out;
}

ConvexBody hull_of(const CellSet& cells) {
    if (cells.empty()) throw Error(ErrorCode::EmptyInput, "empty cell set");
    // Row-extreme cells are enough for the hull.
    std::vector<Vec2> pts;
    for (int j = 0; j < cells.grid.ny; ++j) {
        int lo = -1, hi = -1;
        for (int i = 0; i < cells.grid.nx; ++i) {
            if (cells.at(i, j)) {
                if (lo < 0) lo = i;
                hi = i;
            }
        }
        if (lo >= 0) {
            pts.push_back(cells.grid.at(lo, j));
            if (hi != lo) pts.push_back(cells.grid.at(hi, j));
        }
    }
    try {
        return make_body(pts, 2);
    } catch (const Error&) {
        // Collinear raster: keep it as a degenerate 2D strip handled by rasterize.
        ConvexBody b;
        b.dim = 2;
        b.vertices = hull_points(pts);
        if (b.vertices.empty()) throw Error(ErrorCode::EmptyInput, "empty hull");
        return b;
    }
}

CellSet rasterize(const ConvexBody& body, const Grid2D& grid) {
    CellSet out(grid);
    double tol = 1e-9 * grid.s;
    if (body.vertices.size() < 3) {
        // Degenerate hull: cells whose centers lie on the segment/point.
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                Vec2 p = grid.at(i, j);
                double d = body.vertices.size() == 1
                               ? norm(p - body.vertices[0])
                               : point_segment_dist(p, body.vertices.front(), body.vertices.back());
                if (d <= tol) out.set(i, j);
            }
        return out;
    }
    // Scanline: per row intersect the hull with the row line.
    int n = static_cast<int>(body.vertices.size());
    for (int j = 0; j < grid.ny; ++j) {
        double y = grid.y0 + j * grid.s;
        double xmin = 1e300, xmax = -1e300;
        for (int e = 0; e < n; ++e) {
            Vec2 a = body.vertices[e], b = body.vertices[(e + 1) % n];
            if ((a.y - y) * (b.y - y) <= 0 && std::abs(a.y - b.y) > 0) {
                double t = (y - a.y) / (b.y - a.y);
                if (t >= 0 && t <= 1) {
                    double x = a.x + t * (b.x - a.x);
                    xmin = std::min(xmin, x);
                    xmax = std::max(xmax, x);
                }
            }
            if (std::abs(a.y - y) <= tol) {
                xmin = std::min(xmin, a.x);
                xmax = std::max(xmax, a.x);
            }
        }
        if (xmin > xmax) continue;
        int i0 = static_cast<int>(std::ceil((xmin - grid.x0 - tol) / grid.s));
        int i1 = static_cast<int>(std::floor((xmax - grid.x0 + tol) / grid.s));
        for (int i = std::max(0, i0); i <= std::min(grid.nx - 1, i1); ++i) out.set(i, j);
    }
    return out;
}

double convexity_defect(const ScalarField& field, double l) {
    CellSet cells = superlevel(field, l);
    long c = cells.count();
    if (c == 0) throw Error(ErrorCode::EmptyLevel, "empty super-level set");
    ConvexBody hull = hull_of(cells);
    long hc = rasterize(hull, field.grid).count();
    return static_cast<double>(hc - c) / static_cast<double>(c);
}

std::vector<std::vector<std::pair<int, int>>> rle_rows(const CellSet& cells) {
    std::vector<std::vector<std::pair<int, int>>> rows(cells.grid.ny);
    for (int j = 0; j < cells.grid.ny; ++j) {
        int start = -1;
        for (int i = 0; i <= cells.grid.nx; ++i) {
            bool on = i < cells.grid.nx && cells.at(i, j);
            if (on && start < 0) start = i;
            if (!on && start >= 0) {
                rows[j].push_back({start, i - start});
                start = -1;
            }
        }
    }
    return rows;
}

} // namespace qcfb
