#include "qd/svg.hpp"
#include "qd/topology.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qd {

namespace {

std::string num(double v) {
    char buf[48];
    if (!std::isfinite(v)) throw Error("svg: non-finite coordinate");
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s(buf);
    if (s == "-0.0000") s = "0.0000"; // one spelling for zero
    return s;
}

// y is negated on output so the world y axis points up
std::string pt(cplx z) { return num(z.real()) + "," + num(-z.imag()); }

std::string path_data(const std::vector<cplx>& pts, bool closed) {
    std::string d;
    for (size_t i = 0; i < pts.size(); ++i) {
        d += (i == 0 ? "M" : " L");
        d += pt(pts[i]);
    }
    if (closed && !pts.empty()) d += " Z";
    return d;
}

std::string style_attrs(const SvgStyle& st) {
    std::string s = " fill=\"" + st.fill + "\" stroke=\"" + st.stroke +
                    "\" stroke-width=\"" + num(st.stroke_width) + "\"";
    if (st.opacity != 1.0) s += " opacity=\"" + num(st.opacity) + "\"";
    return s;
}

} // namespace

SvgDoc::SvgDoc(cplx lo, cplx hi, int width_px) : lo_(lo), hi_(hi), width_px_(width_px) {
    if (!(hi.real() > lo.real()) || !(hi.imag() > lo.imag()))
        throw Error("svg: window must have positive extent");
    if (width_px < 16) throw Error("svg: width too small");
}

void SvgDoc::add_path(const std::vector<cplx>& pts, bool closed, const SvgStyle& st) {
    if (pts.empty()) return;
    body_.push_back("<path d=\"" + path_data(pts, closed) + "\"" + style_attrs(st) + "/>");
}

void SvgDoc::add_mask(const RasterDroplet& m, const SvgStyle& st) {
    auto ovals = extract_ovals(m);
    if (ovals.empty()) return;
    std::string d;
    for (const auto& loop : ovals) {
        if (!d.empty()) d += " ";
        d += path_data(loop, true);
    }
    body_.push_back("<path fill-rule=\"evenodd\" d=\"" + d + "\"" + style_attrs(st) + "/>");
}

void SvgDoc::add_circle(cplx c, double r, const SvgStyle& st) {
    body_.push_back("<circle cx=\"" + num(c.real()) + "\" cy=\"" + num(-c.imag()) +
                    "\" r=\"" + num(r) + "\"" + style_attrs(st) + "/>");
}

void SvgDoc::add_dot(cplx c, double r, const std::string& color) {
    body_.push_back("<circle cx=\"" + num(c.real()) + "\" cy=\"" + num(-c.imag()) +
                    "\" r=\"" + num(r) + "\" fill=\"" + color + "\" stroke=\"none\"/>");
}

void SvgDoc::add_label(cplx pos, const std::string& text, double size) {
    std::string esc;
    for (char ch : text) {
        if (ch == '&') esc += "&amp;";
        else if (ch == '<') esc += "&lt;";
        else if (ch == '>') esc += "&gt;";
        else esc += ch;
    }
    body_.push_back("<text x=\"" + num(pos.real()) + "\" y=\"" + num(-pos.imag()) +
                    "\" font-size=\"" + num(size) + "\" font-family=\"monospace\">" + esc +
                    "</text>");
}

std::string SvgDoc::str() const {
    double w = hi_.real() - lo_.real();
    double h = hi_.imag() - lo_.imag();
    int height_px = (int)std::lround(width_px_ * h / w);
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width_px_) +
           "\" height=\"" + std::to_string(height_px) + "\" viewBox=\"" + num(lo_.real()) + " " +
           num(-hi_.imag()) + " " + num(w) + " " + num(h) + "\">\n";
    for (const auto& e : body_) {
        out += e;
        out += "\n";
    }
    out += "</svg>\n";
    return out;
}

void SvgDoc::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("svg: cannot open " + path);
    f << str();
}

} // namespace qd
