#pragma once
// Boolean cell masks on a uniform grid, plus fill, morphology and PGM I/O.
// Cells are squares of side h; cell (i, j) has center origin + h*(i+1/2, j+1/2).

#include "qd/domain.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qd {

struct RasterDroplet {
    cplx origin{0.0}; // lower-left corner of the grid
    double h = 1.0;
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> mask; // row-major: mask[j*nx + i]

    bool in_bounds(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
    bool at(int i, int j) const { return in_bounds(i, j) && mask[(size_t)j * nx + i] != 0; }
    void set(int i, int j, bool v) { mask[(size_t)j * nx + i] = v ? 1 : 0; }
    cplx cell_center(int i, int j) const {
        return origin + cplx((i + 0.5) * h, (j + 0.5) * h);
    }
    // cell containing z (may be out of bounds)
    std::pair<int, int> locate(cplx z) const {
        cplx d = (z - origin) / h;
        return {(int)std::floor(d.real()), (int)std::floor(d.imag())};
    }
    size_t count() const;
    double area() const { return (double)count() * h * h; }
    bool empty() const { return count() == 0; }
};

// same geometry, real value per cell
struct GridField {
    cplx origin{0.0};
    double h = 1.0;
    int nx = 0, ny = 0;
    std::vector<double> v;

    double at(int i, int j) const { return v[(size_t)j * nx + i]; }
    double& at(int i, int j) { return v[(size_t)j * nx + i]; }
    cplx cell_center(int i, int j) const {
        return origin + cplx((i + 0.5) * h, (j + 0.5) * h);
    }
};

// empty grid covering [lo.re, hi.re] x [lo.im, hi.im]
RasterDroplet make_raster(cplx lo, cplx hi, double h);
GridField make_field(cplx lo, cplx hi, double h);

// even-odd scanline fill of closed polylines (cell centers inside an odd
// number of curves are set)
RasterDroplet raster_fill(const std::vector<std::vector<cplx>>& curves, cplx lo, cplx hi,
                          double h);

// mask of the compact side of the spec: Omega for bounded specs, the
// complement K for unbounded ones
RasterDroplet rasterize(const DomainSpec& spec, cplx lo, cplx hi, double h);

// morphology with the 4-neighbourhood structuring element, repeated `steps` times
RasterDroplet erode(const RasterDroplet& m, int steps);
RasterDroplet dilate(const RasterDroplet& m, int steps);

bool is_subset(const RasterDroplet& a, const RasterDroplet& b); // same geometry required
RasterDroplet set_minus(const RasterDroplet& a, const RasterDroplet& b);
RasterDroplet set_and(const RasterDroplet& a, const RasterDroplet& b);
RasterDroplet set_or(const RasterDroplet& a, const RasterDroplet& b);

// symmetric Hausdorff distance between the two masks' cell-center clouds
double hausdorff(const RasterDroplet& a, const RasterDroplet& b);

// number of boundary cells (mask cells with a 4-neighbour off or out of bounds)
// times h: a one-sided perimeter estimate
double perimeter(const RasterDroplet& m);

// PGM (P5) mask next to a JSON sidecar <path>.json with {origin, h, nx, ny}
void save_raster(const RasterDroplet& m, const std::string& path);
RasterDroplet load_raster(const std::string& path);

} // namespace qd
