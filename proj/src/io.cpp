#include "carnot/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace carnot {

namespace {

using nlohmann::json;

bool parse_rational(const json& c, Rational& out) {
    if (c.is_number_integer()) {
        out = {c.get<long long>(), 1};
        return true;
    }
    if (c.is_string()) {
        std::string s = c.get<std::string>();
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) {
                out = {std::stoll(s), 1};
            } else {
                out = {std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1))};
            }
        } catch (const std::exception&) {
            throw ParseError("bad rational coefficient '" + s + "'");
        }
        if (out.den == 0) throw ParseError("zero denominator in coefficient '" + s + "'");
        return true;
    }
    return false;
}

double rational_value(const Rational& r) { return double(r.num) / double(r.den); }

}  // namespace

CarnotGroup group_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.contains("strata") || !doc["strata"].is_array())
        throw ParseError("group spec needs a \"strata\" array");
    std::vector<int> strata = doc["strata"].get<std::vector<int>>();
    int n = 0;
    for (int hs : strata) {
        if (hs <= 0) throw ParseError("strata dimensions must be positive");
        n += hs;
    }

    Tensor3 c(n, n, n);
    bool all_rational = true;
    std::vector<std::vector<std::vector<Rational>>> cr(
        n, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n, Rational{0, 1})));

    if (doc.contains("brackets")) {
        for (const auto& b : doc["brackets"]) {
            int i = b.at("i").get<int>() - 1;
            int j = b.at("j").get<int>() - 1;
            int r = b.at("r").get<int>() - 1;
            if (i < 0 || j < 0 || r < 0 || i >= n || j >= n || r >= n)
                throw ParseError("bracket index out of range");
            if (i >= j) throw ParseError("brackets must list i < j entries only");
            Rational q;
            if (parse_rational(b.at("c"), q)) {
                cr[i][j][r] = q;
                cr[j][i][r] = {-q.num, q.den};
                c(i, j, r) = rational_value(q);
                c(j, i, r) = -rational_value(q);
            } else {
                all_rational = false;
                double v = b.at("c").get<double>();
                c(i, j, r) = v;
                c(j, i, r) = -v;
            }
        }
    }

    ValidationReport rep = all_rational ? CarnotGroup::validate_exact(strata, cr)
                                        : CarnotGroup::validate(strata, c);
    if (!rep.ok()) throw GroupValidationError(rep.to_string());
    return CarnotGroup(strata, std::move(c));
}

CarnotGroup group_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open group spec file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return group_from_json(ss.str());
}

PatchSpec patch_from_json(const std::string& text, int dim) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid patch JSON: ") + e.what());
    }
    PatchSpec spec;
    spec.graph_axis = doc.at("axis").get<int>() - 1;
    if (spec.graph_axis < 0 || spec.graph_axis >= dim) throw ParseError("patch axis out of range");
    std::vector<double> lo = doc.at("lo").get<std::vector<double>>();
    std::vector<double> hi = doc.at("hi").get<std::vector<double>>();
    if (int(lo.size()) != dim - 1 || int(hi.size()) != dim - 1)
        throw ParseError("patch lo/hi must have n-1 entries");
    spec.lo = Eigen::Map<Vec>(lo.data(), lo.size());
    spec.hi = Eigen::Map<Vec>(hi.data(), hi.size());
    if (doc.contains("res")) {
        if (doc["res"].is_array())
            spec.resolution = doc["res"].get<std::vector<int>>();
        else
            spec.resolution.assign(dim - 1, doc["res"].get<int>());
    } else {
        spec.resolution.assign(dim - 1, 64);
    }
    if (doc.contains("rule")) {
        std::string r = doc["rule"].get<std::string>();
        if (r == "midpoint")
            spec.rule = QuadRule::Midpoint;
        else if (r == "gauss")
            spec.rule = QuadRule::GaussLegendre;
        else
            throw ParseError("unknown quadrature rule: " + r);
    }
    if (doc.contains("mask_radius")) spec.mask_radius = doc["mask_radius"].get<double>();
    if (doc.contains("guess")) spec.graph_guess = doc["guess"].get<double>();
    return spec;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double scan_column_value(const PatchNode& node, const std::string& column) {
    if (column == "b_ts") return node.b_ts;
    if (column == "p_h_nu") return node.p_h_norm;
    if (column == "h_cc") return node.h_cc;
    if (column == "s2") return node.s2;
    if (column == "a2") return node.a2;
    if (column == "sigma_h") return node.sigma_h;
    if (column == "sigma_r") return node.sigma_r;
    if (column.rfind("varpi", 0) == 0) {
        int j = std::stoi(column.substr(5));
        if (j < 1 || j > node.varpi.size()) throw ParseError("varpi column index out of range");
        return node.varpi[j - 1];
    }
    throw ParseError("unknown scan column: " + column);
}

std::string scan_csv(const QuadraturePatch& patch) {
    const CarnotGroup& g = patch.group();
    const int n = g.dim(), h = g.hdim();
    std::ostringstream os;
    for (int c = 0; c < n - 1; ++c) os << "u" << c + 1 << ",";
    for (int i = 0; i < n; ++i) os << "x" << i + 1 << ",";
    os << "p_h_nu,";
    for (int a = 0; a < n - h; ++a) os << "varpi" << a + 1 << ",";
    os << "h_cc,s2,a2,b_ts,sigma_r,sigma_h,masked\n";
    for (const auto& nd : patch.nodes()) {
        for (int c = 0; c < n - 1; ++c) os << format_g17(nd.u[c]) << ",";
        for (int i = 0; i < n; ++i) os << format_g17(nd.x[i]) << ",";
        os << format_g17(nd.p_h_norm) << ",";
        for (int a = 0; a < n - h; ++a) os << format_g17(nd.varpi[a]) << ",";
        os << format_g17(nd.h_cc) << "," << format_g17(nd.s2) << "," << format_g17(nd.a2) << ","
           << format_g17(nd.b_ts) << "," << format_g17(nd.sigma_r) << ","
           << format_g17(nd.masked ? std::numeric_limits<double>::quiet_NaN() : nd.sigma_h) << ","
           << (nd.masked ? 1 : 0) << "\n";
    }
    return os.str();
}

std::string scan_json(const QuadraturePatch& patch) {
    const CarnotGroup& g = patch.group();
    const int n = g.dim(), h = g.hdim();
    std::ostringstream os;
    os << "[\n";
    bool first = true;
    for (const auto& nd : patch.nodes()) {
        if (!first) os << ",\n";
        first = false;
        os << "{\"u\":[";
        for (int c = 0; c < n - 1; ++c) os << (c ? "," : "") << format_g17(nd.u[c]);
        os << "],\"x\":[";
        for (int i = 0; i < n; ++i) os << (i ? "," : "") << format_g17(nd.x[i]);
        os << "],\"p_h_nu\":" << format_g17(nd.p_h_norm) << ",\"varpi\":[";
        for (int a = 0; a < n - h; ++a) os << (a ? "," : "") << format_g17(nd.varpi[a]);
        os << "],\"h_cc\":" << format_g17(nd.h_cc) << ",\"s2\":" << format_g17(nd.s2)
           << ",\"a2\":" << format_g17(nd.a2) << ",\"b_ts\":" << format_g17(nd.b_ts)
           << ",\"sigma_r\":" << format_g17(nd.sigma_r) << ",\"sigma_h\":"
           << format_g17(nd.masked ? std::numeric_limits<double>::quiet_NaN() : nd.sigma_h)
           << ",\"masked\":" << (nd.masked ? "true" : "false") << "}";
    }
    os << "\n]\n";
    return os.str();
}

namespace {

// simple diverging colormap: blue (lo) - white (0 or mid) - red (hi)
void colormap(double t, int& r, int& g, int& b) {
    t = std::min(1.0, std::max(0.0, t));
    if (t < 0.5) {
        double s = t / 0.5;
        r = int(40 + s * 215);
        g = int(80 + s * 175);
        b = 255;
    } else {
        double s = (t - 0.5) / 0.5;
        r = 255;
        g = int(255 - s * 175);
        b = int(255 - s * 215);
    }
}

}  // namespace

std::string scan_svg(const QuadraturePatch& patch, const std::string& column) {
    const int d = int(patch.spec().lo.size());
    if (d != 2) throw Error("scan_svg requires a 2-d chart domain");
    int nx = patch.spec().resolution[0];
    int ny = patch.spec().resolution[1];
    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    for (const auto& nd : patch.nodes()) {
        double v = scan_column_value(nd, column);
        if (std::isnan(v)) continue;
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (!(vmin <= vmax)) { vmin = 0.0; vmax = 1.0; }
    double span = vmax - vmin;
    if (span <= 0) span = 1.0;

    const int cell = 8, legend_h = 42;
    int wpx = nx * cell, hpx = ny * cell;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << wpx << "\" height=\""
       << hpx + legend_h << "\">\n";
    // nodes are emitted row-major with the last axis fastest
    for (std::size_t i = 0; i < patch.nodes().size(); ++i) {
        const PatchNode& nd = patch.nodes()[i];
        int ix = int(i) / ny, iy = int(i) % ny;
        double v = scan_column_value(nd, column);
        std::string fill = "#b0b0b0";  // masked / undefined
        if (!std::isnan(v)) {
            int r, g, b;
            colormap((v - vmin) / span, r, g, b);
            char buf[16];
            std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
            fill = buf;
        }
        os << "<rect x=\"" << ix * cell << "\" y=\"" << (ny - 1 - iy) * cell << "\" width=\"" << cell
           << "\" height=\"" << cell << "\" fill=\"" << fill << "\"/>\n";
    }
    for (int s = 0; s < 64; ++s) {
        int r, g, b;
        colormap(s / 63.0, r, g, b);
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
        os << "<rect x=\"" << s * wpx / 64 << "\" y=\"" << hpx + 8 << "\" width=\""
           << (wpx + 63) / 64 << "\" height=\"12\" fill=\"" << buf << "\"/>\n";
    }
    os << "<text x=\"0\" y=\"" << hpx + 36 << "\" font-size=\"11\" font-family=\"monospace\">"
       << column << "  min=" << format_g17(vmin) << "  max=" << format_g17(vmax) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace carnot
