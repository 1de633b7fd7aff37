#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polycert/corpus.hpp"
#include "polycert/io.hpp"

namespace {

using namespace polycert;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PolytopeDocument load_polytope(const std::string& path) { return parse_polytope_text(read_file(path)); }

std::string vec_text(const IntVec& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += v[i].str();
    }
    return s + ")";
}

std::string coords_text(const RatVec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += coord_string(v[i]);
    }
    return s;
}

std::string indices_text(const std::vector<std::size_t>& idx) {
    std::string s = "{";
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(idx[i]);
    }
    return s + "}";
}

const char* bool_text(bool b) { return b ? "true" : "false"; }

std::vector<Int> facet_volumes(const LatticePolytope& P) {
    std::vector<Int> vols;
    for (const Facet& f : P.facets()) vols.push_back(f.lattice_volume);
    return vols;
}

int run_analyze(const std::string& path, bool json_out) {
    PolytopeDocument doc = load_polytope(path);
    const LatticePolytope& P = doc.polytope;
    if (json_out) {
        std::cout << analysis_json(P, doc.name).dump(2) << "\n";
        return 0;
    }
    if (!doc.name.empty()) std::cout << "name: " << doc.name << "\n";
    std::cout << "dim: " << P.dim() << "\n";
    std::cout << "vertices:";
    for (const IntVec& v : P.vertices()) std::cout << " " << vec_text(v);
    std::cout << "\n";
    ReflexivityReport refl = P.is_reflexive();
    SmoothnessReport smth = P.is_smooth();
    std::cout << "reflexive: " << bool_text(refl.reflexive);
    if (!refl.reason.empty()) std::cout << " (" << refl.reason << ")";
    std::cout << "\n";
    std::cout << "smooth: " << bool_text(smth.smooth);
    if (!smth.reason.empty()) std::cout << " (" << smth.reason << ")";
    std::cout << "\n";
    std::cout << "centered: " << bool_text(P.is_centered()) << "\n";
    std::cout << "normalized volume: " << P.normalized_volume().str() << "\n";
    std::cout << "barycenter: " << coords_text(P.barycenter()) << "\n";
    std::cout << "facets:\n";
    for (const Facet& f : P.facets())
        std::cout << "  normal " << vec_text(f.normal) << " offset " << f.offset.str()
                  << " volume " << f.lattice_volume.str() << " vertices "
                  << indices_text(f.vertices) << "\n";
    return 0;
}

void print_report_text(const ConcentrationReport& rep) {
    std::cout << "mode: " << to_string(rep.mode) << "\n";
    std::cout << "rhs: " << rat_string(rep.rhs) << "\n";
    std::cout << "overall: " << to_string(rep.overall) << "\n";
    std::cout << "records:\n";
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
        const ConcentrationRecord& rec = rep.records[i];
        std::cout << "  [" << i << "] dim " << rec.dim;
        if (rec.affine) {
            std::cout << " base (" << coords_text(rec.affine->base()) << ")";
            if (rec.affine->dim() > 0) {
                std::cout << " dirs";
                for (const IntVec& d : rec.affine->dirs().rows()) std::cout << " " << vec_text(d);
            }
        }
        if (rec.linear) {
            std::cout << " span";
            for (const IntVec& d : rec.linear->rows()) std::cout << " " << vec_text(d);
        }
        std::cout << " incident " << indices_text(rec.incident) << " lhs " << rat_string(rec.lhs)
                  << " " << to_string(rec.status) << "\n";
    }
    if (!rep.equality_pairs.empty()) {
        std::cout << "equality pairs:";
        for (const auto& [a, b] : rep.equality_pairs) std::cout << " [" << a << "]+[" << b << "]";
        std::cout << "\n";
    }
    if (!rep.unpaired_equalities.empty()) {
        std::cout << "unpaired equalities:";
        for (std::size_t i : rep.unpaired_equalities) std::cout << " [" << i << "]";
        std::cout << "\n";
    }
}

int run_check(const std::string& path, const std::string& mode_name, bool with_oracle,
              bool json_out) {
    PolytopeDocument doc = load_polytope(path);
    const LatticePolytope& P = doc.polytope;
    ConcentrationMode mode = mode_name == "affine"  ? ConcentrationMode::affine
                             : mode_name == "linear" ? ConcentrationMode::linear
                                                     : ConcentrationMode::lifted;
    ConcentrationReport rep = mode == ConcentrationMode::affine  ? check_affine(P)
                              : mode == ConcentrationMode::linear ? check_linear(P)
                                                                  : check_lifted(P);
    if (with_oracle) {
        auto [normals, volumes] = detail::facet_data(P);
        OracleReport oracle = concentration_oracle(normals, volumes, P.dim(), mode);
        if (!concentration_agrees(rep, oracle)) {
            std::cerr << "check: candidate evaluation disagrees with the exhaustive oracle\n";
            return 2;
        }
    }
    if (json_out)
        std::cout << report_json(rep).dump(2) << "\n";
    else
        print_report_text(rep);
    return rep.overall == ConcentrationOverall::violated ? 1 : 0;
}

int run_bundle(const std::string& path, bool fan_of_cone, bool json_out) {
    PolytopeDocument doc = load_polytope(path);
    const LatticePolytope& P = doc.polytope;
    Fan fan = Fan::normal_fan(P);
    KlyachkoBundleData data = canonical_extension(fan);
    StabilityReport stab = stability_verdict(data, facet_volumes(P));
    CompatibilityReport compat = compatibility_check(fan, data);
    if (json_out) {
        std::cout << bundle_json(fan, data, stab, compat, fan_of_cone).dump(2) << "\n";
        return 0;
    }
    std::cout << "rank: " << data.rank << "\n";
    for (std::size_t r = 0; r < fan.rays().size(); ++r) {
        std::cout << "ray " << r << " " << vec_text(fan.rays()[r]) << ":";
        for (const FiltrationStep& s : data.filtrations[r].steps) {
            std::cout << " level " << s.level.str() << " dim " << s.subspace.dim() << " basis";
            for (const IntVec& b : s.subspace.rows()) std::cout << " " << vec_text(b);
        }
        std::cout << "\n";
    }
    std::cout << "stability: " << to_string(stab.verdict) << "\n";
    std::cout << "slope: " << rat_string(stab.mu_total) << "\n";
    if (!stab.witnesses.empty()) {
        std::cout << "maximal subspaces:\n";
        for (std::size_t w : stab.witnesses) {
            std::cout << "  mu " << rat_string(stab.records[w].mu) << " span";
            for (const IntVec& b : stab.records[w].subspace.rows())
                std::cout << " " << vec_text(b);
            std::cout << "\n";
        }
    }
    if (compat.compatible)
        std::cout << "compatibility: every maximal cone decomposes\n";
    else
        std::cout << "compatibility: failed at cone " << *compat.failing_cone << "\n";
    if (fan_of_cone) {
        Fan cf = cone_fan(fan, false);
        std::cout << "cone fan rays:";
        for (const IntVec& r : cf.rays()) std::cout << " " << vec_text(r);
        std::cout << "\n";
        std::cout << "cone fan maximal cones:";
        for (const auto& c : cf.maximal_cones()) std::cout << " " << indices_text(c);
        std::cout << "\n";
        std::cout << "cone fan smooth: " << bool_text(cf.smooth().smooth) << "\n";
    }
    return 0;
}

int run_enumerate(int dim, long long bound, const std::string& out_dir) {
    if (dim != 2) {
        std::cerr << "enumerate: only dimension 2 is supported\n";
        return 2;
    }
    std::vector<LatticePolytope> classes = enumerate_reflexive_polygons(bound);
    std::size_t smooth = 0;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const LatticePolytope& P = classes[i];
        bool s = P.is_smooth().smooth;
        if (s) ++smooth;
        std::cout << "class " << i << ": " << P.vertices().size() << " vertices, volume "
                  << P.normalized_volume().str() << ", smooth " << bool_text(s) << ", centered "
                  << bool_text(P.is_centered()) << ", vertices";
        for (const IntVec& v : P.vertices()) std::cout << " " << vec_text(v);
        std::cout << "\n";
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        for (std::size_t i = 0; i < classes.size(); ++i) {
            std::ostringstream name;
            name << "reflexive-2d-" << std::setw(2) << std::setfill('0') << i;
            Json doc = polytope_json(classes[i], name.str());
            doc["annotations"] = {{"reflexive", classes[i].is_reflexive().reflexive},
                                  {"smooth", classes[i].is_smooth().smooth},
                                  {"centered", classes[i].is_centered()}};
            std::ofstream out(std::filesystem::path(out_dir) / (name.str() + ".json"));
            out << doc.dump(2) << "\n";
        }
    }
    std::cout << classes.size() << " classes, " << smooth << " smooth\n";
    return 0;
}

// Gated assertions: on smooth, reflexive, centered input the affine
// conditions must hold with every equality paired, and the canonical
// extension must not be unstable.  The verdict bridge needs only
// smoothness, so it is checked on every smooth entry.
struct VerifyState {
    bool all_ok = true;
    std::size_t checked = 0;
};

void verify_entry(VerifyState& st, const std::string& name, const LatticePolytope& P,
                  bool reflexive, bool smooth, bool centered) {
    bool entry_ok = true;
    auto fail = [&](const std::string& what) {
        std::cout << "FAIL " << name << ": " << what << "\n";
        st.all_ok = false;
        entry_ok = false;
    };
    ConcentrationReport affine = check_affine(P);
    std::optional<StabilityVerdict> verdict;
    if (smooth) {
        Fan fan = Fan::normal_fan(P);
        StabilityReport stab = stability_verdict(canonical_extension(fan), facet_volumes(P));
        verdict = stab.verdict;
        bool bridge =
            ((stab.verdict == StabilityVerdict::unstable) ==
             (affine.overall == ConcentrationOverall::violated)) &&
            ((stab.verdict == StabilityVerdict::strictly_semistable) ==
             (affine.overall == ConcentrationOverall::holds_with_equality)) &&
            ((stab.verdict == StabilityVerdict::stable) ==
             (affine.overall == ConcentrationOverall::holds_strictly));
        if (!bridge) fail("stability verdict does not match the affine verdict");
    }
    if (smooth && reflexive && centered) {
        if (affine.overall == ConcentrationOverall::violated) fail("affine conditions violated");
        if (!affine.unpaired_equalities.empty())
            fail("equality record without a complementary partner");
        if (verdict && *verdict == StabilityVerdict::unstable) fail("canonical extension unstable");
    }
    ++st.checked;
    if (entry_ok) {
        std::cout << "ok " << name << ": affine " << to_string(affine.overall);
        if (verdict) std::cout << ", bundle " << to_string(*verdict);
        std::cout << "\n";
    }
}

int run_verify_corpus() {
    VerifyState st;
    const char* dir = std::getenv("POLYCERT_CORPUS_DIR");
    if (dir) {
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(dir))
            if (e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            std::cout << "warning: corpus directory " << dir << " holds no polytopes\n";
            return 0;
        }
        for (const auto& f : files) {
            PolytopeDocument doc = load_polytope(f.string());
            std::string name = doc.name.empty() ? f.stem().string() : doc.name;
            bool reflexive = doc.polytope.is_reflexive().reflexive;
            bool smooth = doc.polytope.is_smooth().smooth;
            bool centered = doc.polytope.is_centered();
            if (doc.reflexive && *doc.reflexive != reflexive) {
                std::cout << "FAIL entry " << name << " mislabeled: reflexive\n";
                return 1;
            }
            if (doc.smooth && *doc.smooth != smooth) {
                std::cout << "FAIL entry " << name << " mislabeled: smooth\n";
                return 1;
            }
            if (doc.centered && *doc.centered != centered) {
                std::cout << "FAIL entry " << name << " mislabeled: centered\n";
                return 1;
            }
            verify_entry(st, name, doc.polytope, reflexive, smooth, centered);
        }
    } else {
        for (const CorpusEntry& e : builtin_corpus())
            verify_entry(st, e.name, e.polytope, e.reflexive, e.smooth, e.centered);
        std::vector<LatticePolytope> classes = enumerate_reflexive_polygons(3);
        for (std::size_t i = 0; i < classes.size(); ++i) {
            std::ostringstream name;
            name << "reflexive-2d-" << std::setw(2) << std::setfill('0') << i;
            verify_entry(st, name.str(), classes[i], classes[i].is_reflexive().reflexive,
                         classes[i].is_smooth().smooth, classes[i].is_centered());
        }
    }
    if (st.all_ok) {
        std::cout << "verified " << st.checked << " entries\n";
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact verifier for lattice polytope concentration and toric bundle stability"};
    app.require_subcommand(1);

    std::string input_path, mode = "affine", out_dir;
    bool json_out = false, with_oracle = false, fan_of_cone = false;
    int dim = 2;
    long long bound = 3;

    CLI::App* analyze = app.add_subcommand("analyze", "predicates, facet table and barycenter");
    analyze->add_option("file", input_path, "polytope json file")->required();
    analyze->add_flag("--json", json_out, "emit the full analysis document");

    CLI::App* check = app.add_subcommand("check", "concentration inequalities");
    check->add_option("file", input_path, "polytope json file")->required();
    check->add_option("--mode", mode, "affine, linear or lifted")
        ->required()
        ->check(CLI::IsMember({"affine", "linear", "lifted"}));
    check->add_flag("--oracle", with_oracle, "cross-check against the exhaustive oracle");
    check->add_flag("--json", json_out, "emit the report as json");

    CLI::App* bundle = app.add_subcommand("bundle", "canonical extension and stability");
    bundle->add_option("file", input_path, "polytope json file")->required();
    bundle->add_flag("--fan-of-cone", fan_of_cone, "also print the cone fan");
    bundle->add_flag("--json", json_out, "emit the bundle document as json");

    CLI::App* enumerate = app.add_subcommand("enumerate", "reflexive polygon classes");
    enumerate->add_option("--dim", dim, "ambient dimension (only 2)")->required();
    enumerate->add_option("--bound", bound, "vertex coordinate box bound")->required();
    enumerate->add_option("--out", out_dir, "write class representatives here");

    CLI::App* verify =
        app.add_subcommand("verify-corpus", "re-verify flags and conditions on every corpus entry");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) return run_analyze(input_path, json_out);
        if (check->parsed()) return run_check(input_path, mode, with_oracle, json_out);
        if (bundle->parsed()) return run_bundle(input_path, fan_of_cone, json_out);
        if (enumerate->parsed()) return run_enumerate(dim, bound, out_dir);
        if (verify->parsed()) return run_verify_corpus();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
