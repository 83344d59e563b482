#pragma once
// Deterministic SVG emission for masks, contours, orbits and node markers:
// fixed element order (insertion order), fixed %.4f coordinate precision, no
// timestamps, so identical inputs give byte-identical documents.

#include "qd/raster.hpp"

#include <string>
#include <vector>

namespace qd {

struct SvgStyle {
    std::string stroke = "#000000";
    double stroke_width = 0.01; // world units
    std::string fill = "none";
    double opacity = 1.0;
};

class SvgDoc {
public:
    // world window [lo, hi]; the y axis points up (flipped internally)
    SvgDoc(cplx lo, cplx hi, int width_px = 640);

    // polyline; closed = true appends Z
    void add_path(const std::vector<cplx>& pts, bool closed, const SvgStyle& st);
    // all boundary loops of the mask as one even-odd path (holes punched)
    void add_mask(const RasterDroplet& m, const SvgStyle& st);
    void add_circle(cplx c, double r, const SvgStyle& st);
    void add_dot(cplx c, double r, const std::string& color); // filled marker
    void add_label(cplx pos, const std::string& text, double size);

    std::string str() const;
    void save(const std::string& path) const;

private:
    cplx lo_, hi_;
    int width_px_;
    std::vector<std::string> body_;
};

} // namespace qd
