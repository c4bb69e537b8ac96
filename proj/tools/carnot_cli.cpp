// Batch driver for the carnot library: group validation, surface scans,
// identity suites, perimeter and variation runs, stability certificates.
//
// Exit codes: 0 ok, 1 check failed, 2 input error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "carnot/examples.hpp"
#include "carnot/expr.hpp"
#include "carnot/io.hpp"
#include "carnot/variation.hpp"

using namespace carnot;
using ordered_json = nlohmann::ordered_json;

namespace {

std::shared_ptr<const CarnotGroup> load_group(const std::string& spec) {
    if (spec.size() >= 2 && spec[0] == 'h' && std::isdigit(static_cast<unsigned char>(spec[1]))) {
        int n = std::stoi(spec.substr(1));
        return std::make_shared<CarnotGroup>(CarnotGroup::heisenberg(n));
    }
    if (spec.rfind("abelian:", 0) == 0) {
        int n = std::stoi(spec.substr(8));
        return std::make_shared<CarnotGroup>(CarnotGroup::abelian(n));
    }
    return std::make_shared<CarnotGroup>(group_from_json_file(spec));
}

struct Surface {
    ScalarField f;
    int default_axis = 0;  // 0-based canonical chart axis
    std::string id;
};

Surface load_surface(const std::string& spec, const std::shared_ptr<const CarnotGroup>& g) {
    Surface s;
    if (spec.rfind("expr:", 0) == 0) {
        s.f = parse_surface_expression(spec.substr(5), g->dim());
        s.default_axis = g->dim() - 1;
        s.id = "expr";
        return s;
    }
    std::string id = spec, args;
    if (auto colon = spec.find(':'); colon != std::string::npos) {
        id = spec.substr(0, colon);
        args = spec.substr(colon + 1);
    }
    if (id == "vplane") {
        Vec d = Vec::Zero(g->hdim());
        if (args.empty()) {
            d[0] = 1.0;
        } else {
            std::stringstream ss(args);
            std::string tok;
            int i = 0;
            while (std::getline(ss, tok, ',') && i < g->hdim()) d[i++] = std::stod(tok);
        }
        ExampleSurface ex = vertical_hyperplane(g, d);
        return {ex.f, ex.chart_axis, ex.id};
    }
    if (id == "nvplane") {
        int alpha = args.empty() ? g->hdim() : std::stoi(args) - 1;
        ExampleSurface ex = nonvertical_hyperplane(g, alpha);
        return {ex.f, ex.chart_axis, ex.id};
    }
    if (id == "hparab") {
        ExampleSurface ex = builtin_example("hparab", g);
        return {ex.f, ex.chart_axis, ex.id};
    }
    throw ParseError("unknown surface spec: " + spec);
}

PatchSpec load_patch(const std::string& spec, const Surface& s, int dim) {
    if (!spec.empty()) {
        if (!spec.empty() && spec[0] == '{') return patch_from_json(spec, dim);
        std::ifstream in(spec);
        if (!in) throw ParseError("cannot open patch spec file: " + spec);
        std::stringstream ss;
        ss << in.rdbuf();
        return patch_from_json(ss.str(), dim);
    }
    PatchSpec p;
    p.graph_axis = s.default_axis;
    int d = dim - 1;
    double lo = 0.25, hi = 1.25;
    if (s.id == "vplane") { lo = 0.0; hi = 1.0; }
    p.lo = Vec::Constant(d, lo);
    p.hi = Vec::Constant(d, hi);
    p.resolution.assign(d, d <= 2 ? 64 : 8);  // node counts stay manageable on high-d charts
    return p;
}

void write_output(const std::string& out, const std::string& content) {
    if (out.empty() || out == "-") {
        std::cout << content;
        return;
    }
    std::ofstream of(out, std::ios::binary);
    if (!of) throw ParseError("cannot open output file: " + out);
    of << content;
}

std::string certificate_name(StabilityCertificate::Kind k) {
    switch (k) {
        case StabilityCertificate::Kind::StableBySignDefiniteVarpi: return "StableBySignDefiniteVarpi";
        case StabilityCertificate::Kind::StableByNonnegativePotential: return "StableByNonnegativePotential";
        case StabilityCertificate::Kind::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"horizontal geometry of hypersurfaces in Carnot groups"};
    app.require_subcommand(1);

    std::string group_spec = "h1", surface_spec = "hparab", patch_spec, out, format = "csv";
    std::string column = "b_ts";
    double tol = 1e-7, tol_fd = 1e-4;
    unsigned long long seed = 7;
    int samples = 100, bumps = 10;

    auto add_common = [&](CLI::App* cmd, bool with_surface) {
        cmd->add_option("--group", group_spec, "builtin id (h1, h2, ..., abelian:n) or JSON spec file");
        if (with_surface) {
            cmd->add_option("--surface", surface_spec,
                            "builtin id (vplane[:d1,..], nvplane[:alpha], hparab) or expr:<expression>");
            cmd->add_option("--patch", patch_spec, "patch spec (JSON file or inline JSON)");
        }
        cmd->add_option("--seed", seed, "seed for random sampling");
        cmd->add_option("--out", out, "output path (default stdout)");
    };

    auto* c_validate = app.add_subcommand("validate", "validate a group specification");
    add_common(c_validate, false);

    auto* c_scan = app.add_subcommand("scan", "tabulate surface geometry over a patch");
    add_common(c_scan, true);
    c_scan->add_option("--format", format, "csv | json | svg");
    c_scan->add_option("--column", column, "svg column (b_ts, p_h_nu, h_cc, s2, a2, sigma_h, varpi<j>)");

    auto* c_ident = app.add_subcommand("identities", "run the geometric identity suite");
    add_common(c_ident, true);
    c_ident->add_option("--tol", tol, "tolerance for analytic jets");
    c_ident->add_option("--tol-fd", tol_fd, "tolerance for finite-difference jets");
    c_ident->add_option("--samples", samples, "sample points per block");

    auto* c_stab = app.add_subcommand("stability", "certificate + second variation of a bump library");
    add_common(c_stab, true);
    c_stab->add_option("--bumps", bumps, "number of random bumps");

    auto* c_per = app.add_subcommand("perimeter", "H-perimeter of a patch");
    add_common(c_per, true);

    auto* c_var = app.add_subcommand("variation", "first/second variation for random bumps");
    add_common(c_var, true);
    c_var->add_option("--bumps", bumps, "number of random bumps");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_validate->parsed()) {
            try {
                auto g = load_group(group_spec);
                std::ostringstream os;
                os << "valid group: n=" << g->dim() << " step=" << g->step()
                   << " Q=" << g->homogeneous_dimension() << "\n";
                write_output(out, os.str());
                return 0;
            } catch (const GroupValidationError& e) {
                std::cerr << e.what();
                return 1;
            }
        }

        auto g = load_group(group_spec);
        Surface surf = load_surface(surface_spec, g);
        PatchSpec pspec = load_patch(patch_spec, surf, g->dim());
        QuadraturePatch patch(*g, surf.f, pspec);

        if (c_scan->parsed()) {
            if (format == "csv") {
                write_output(out, scan_csv(patch));
            } else if (format == "json") {
                write_output(out, scan_json(patch));
            } else if (format == "svg") {
                write_output(out, scan_svg(patch, column));
            } else {
                throw ParseError("unknown scan format: " + format);
            }
            return 0;
        }

        if (c_ident->parsed()) {
            IdentityOptions opt;
            opt.samples = samples;
            opt.seed = seed;
            opt.tol_analytic = tol;
            opt.tol_fd = tol_fd;
            bool all_pass = true;
            std::ostringstream os;
            for (bool fd : {false, true}) {
                opt.use_fd = fd;
                os << (fd ? "# finite-difference jets\n" : "# analytic jets\n");
                for (const auto& row : verify_identities(patch, opt)) {
                    all_pass = all_pass && row.pass;
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "%-34s %12.4e  tol %8.1e  %s\n", row.name.c_str(),
                                  row.residual, row.tolerance, row.pass ? "pass" : "FAIL");
                    os << buf;
                }
            }
            write_output(out, os.str());
            return all_pass ? 0 : 1;
        }

        if (c_per->parsed()) {
            ordered_json j;
            j["h_perimeter"] = patch.h_perimeter();
            j["riemannian_area"] = patch.r_area();
            j["masked_fraction"] = patch.masked_fraction();
            j["min_p_h_nu"] = patch.min_unmasked_p_h_norm();
            write_output(out, j.dump(2) + "\n");
            return 0;
        }

        if (c_stab->parsed() || c_var->parsed()) {
            std::mt19937_64 rng(seed);
            ordered_json j;
            if (c_stab->parsed()) {
                StabilityCertificate cert = stability_certificate(patch);
                ordered_json jc;
                jc["kind"] = certificate_name(cert.kind);
                if (cert.alpha >= 0) jc["alpha"] = cert.alpha + 1;
                jc["margin"] = cert.margin;
                jc["nodes"] = cert.node_count;
                jc["masked_fraction"] = cert.masked_fraction;
                jc["min_p_h_nu"] = cert.min_p_h_norm;
                jc["reason"] = cert.reason;
                j["certificate"] = jc;
            }
            ordered_json jb = ordered_json::array();
            for (int b = 0; b < bumps; ++b) {
                TestFunction w = TestFunction::random(pspec.lo, pspec.hi, rng);
                ordered_json r;
                r["center"] = std::vector<double>(w.center().data(), w.center().data() + w.center().size());
                r["halfwidth"] =
                    std::vector<double>(w.halfwidth().data(), w.halfwidth().data() + w.halfwidth().size());
                r["amplitude"] = w.amplitude();
                if (c_var->parsed()) r["first_variation"] = first_variation(patch, w);
                try {
                    SecondVariation sv = second_variation(patch, w);
                    r["second_variation"] = sv.value;
                    r["gradient_term"] = sv.gradient_term;
                    r["potential_term"] = sv.potential_term;
                } catch (const NotHMinimalOnPatch&) {
                    r["second_variation"] = nullptr;
                }
                jb.push_back(r);
            }
            j["bumps"] = jb;
            write_output(out, j.dump(2) + "\n");
            return 0;
        }
    } catch (const GroupValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
