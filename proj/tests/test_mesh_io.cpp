#include "anthro/dataset.hpp"
#include "anthro/errors.hpp"
#include "anthro/head_desc.hpp"
#include "anthro/synth.hpp"
#include "anthro/validate.hpp"

#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace anthro;

TEST_CASE("obj: smallest valid mesh")
{
    std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    const Mesh m = parse_obj(in);
    CHECK(m.vertices.size() == 3);
    CHECK(m.triangles.size() == 1);
}

TEST_CASE("obj: out-of-range index names the index")
{
    std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 2 5\n");
    try {
        parse_obj(in);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find('5') != std::string::npos);
    }
}

TEST_CASE("obj: malformed line reports its line number")
{
    std::istringstream in("v 0 0 0\nv 1 0\n");
    try {
        parse_obj(in);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("obj: cube of quads fan-splits to 12 triangles")
{
    std::istringstream in("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n"
                          "f 1 4 3 2\nf 5 6 7 8\nf 1 2 6 5\nf 2 3 7 6\nf 3 4 8 7\nf 4 1 5 8\n"
                          "vn 0 0 1\n# comment\n");
    ObjReadStats stats;
    const Mesh m = parse_obj(in, &stats);
    CHECK(m.vertices.size() == 8);
    CHECK(m.triangles.size() == 12);
    CHECK(stats.quads_split == 6);
    CHECK(stats.ignored_lines >= 1);
}

TEST_CASE("obj: slash-separated face indices")
{
    std::istringstream in("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1/1 2/2/2 3//3\n");
    CHECK(parse_obj(in).triangles.size() == 1);
}

TEST_CASE("obj: write then reparse is identical")
{
    const Mesh a = testing_support::uv_sphere(97.3, 8, 16);
    std::stringstream ss;
    write_obj(ss, a);
    const Mesh b = parse_obj(ss);
    REQUIRE(a.vertices.size() == b.vertices.size());
    for (std::size_t i = 0; i < a.vertices.size(); ++i) CHECK(a.vertices[i] == b.vertices[i]);
    CHECK(a.triangles == b.triangles);
}

TEST_CASE("obj: missing file")
{
    CHECK_THROWS_AS(load_mesh("/nonexistent/x.obj"), NotFoundError);
}

namespace {

std::string landmark_rows(const std::string& subject, const std::string& pose, std::vector<int> ids)
{
    std::string s;
    for (int id : ids)
        s += subject + "," + pose + "," + std::to_string(id) + "," + std::string(landmark_name(id).value_or("x")) + "," + std::to_string(id) + ",0,0\n";
    return s;
}

} // namespace

TEST_CASE("landmarks: one subject with the ten table ids")
{
    std::istringstream in(std::string(kLandmarkCsvHeader) + "\n" +
                          landmark_rows("A", "standing", {1, 2, 3, 4, 5, 6, 7, 8, 10, 12}));
    const auto f = parse_landmarks(in);
    REQUIRE(f.sets.size() == 1);
    CHECK(f.sets[0].points.size() == 10);
    CHECK(f.warnings.empty());
    CHECK(f.sets[0].points.at(5).name == "Rt Tragion");
}

TEST_CASE("landmarks: duplicate id in a group")
{
    std::istringstream in(std::string(kLandmarkCsvHeader) + "\n" + landmark_rows("A", "standing", {5, 5}));
    CHECK_THROWS_AS(parse_landmarks(in), DuplicateLandmarkError);
}

TEST_CASE("landmarks: two subjects by two poses give four sets")
{
    std::istringstream in(std::string(kLandmarkCsvHeader) + "\n" + landmark_rows("A", "standing", {1, 2}) +
                          landmark_rows("A", "sitting", {1, 2}) + landmark_rows("B", "standing", {1, 2}) +
                          landmark_rows("B", "sitting", {1, 2, 999}));
    const auto f = parse_landmarks(in);
    CHECK(f.sets.size() == 4);
    CHECK(f.warnings.size() == 1);
}

TEST_CASE("landmarks: header and pose are enforced")
{
    std::istringstream bad_header("subject,pose\nA,standing\n");
    CHECK_THROWS_AS(parse_landmarks(bad_header), ParseError);
    std::istringstream bad_pose(std::string(kLandmarkCsvHeader) + "\nA,lying,1,Sellion,0,0,0\n");
    CHECK_THROWS_AS(parse_landmarks(bad_pose), ParseError);
}

TEST_CASE("landmarks: write and parse round-trip")
{
    SynthParams p;
    p.n_subjects = 2;
    const Dataset ds = synth_population(p);
    std::vector<LandmarkSet> sets;
    for (const auto& r : ds.records) sets.push_back(r.landmarks);
    std::stringstream ss;
    write_landmarks(ss, sets);
    const auto back = parse_landmarks(ss);
    REQUIRE(back.sets.size() == sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (const auto& entry : sets[i].points) {
            const int id = entry.first;
            CHECK(back.sets[i].at(id) == entry.second.position);
        }
}

TEST_CASE("synth: bone distances survive the pose change exactly")
{
    SynthParams p;
    p.n_subjects = 1;
    p.landmark_noise_mm = 0;
    const Dataset ds = synth_population(p);
    REQUIRE(ds.records.size() == 2);
    const auto& st = ds.records[0].landmarks;
    const auto& si = ds.records[1].landmarks;
    CHECK(ds.records[1].mesh.pose == Pose::Sitting);
    const PairSpec spec = PairSpec::default_spec();
    for (auto [a, b] : spec.pairs()) {
        const double d0 = (st.at(a) - st.at(b)).norm(), d1 = (si.at(a) - si.at(b)).norm();
        CHECK(std::abs(d0 - d1) <= 1e-9 * d0);
    }
    // The pose really differs.
    CHECK((st.at(lm::RtKnee) - si.at(lm::RtKnee)).norm() > 100.0);
}

TEST_CASE("synth: same seed gives byte-identical datasets")
{
    SynthParams p;
    p.n_subjects = 200;
    p.seed = 7;
    const auto dir_a = testing_support::temp_dir("synth_a"), dir_b = testing_support::temp_dir("synth_b");
    write_dataset(dir_a, synth_population(p));
    write_dataset(dir_b, synth_population(p));
    auto slurp = [](const std::filesystem::path& f) {
        std::ifstream in(f, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    CHECK(slurp(dir_a / "landmarks.csv") == slurp(dir_b / "landmarks.csv"));
    for (const char* s : {"S0001", "S0100", "S0200"})
        for (const char* pose : {"standing.obj", "sitting.obj"})
            CHECK(slurp(dir_a / s / pose) == slurp(dir_b / s / pose));
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("synth: landmark noise has the requested spread")
{
    SynthParams p;
    p.n_subjects = 200;
    p.seed = 3;
    p.landmark_noise_mm = 0;
    const Dataset clean = synth_population(p);
    p.landmark_noise_mm = 15;
    const Dataset noisy = synth_population(p);
    double ss = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < clean.records.size(); ++i) {
        CHECK(clean.records[i].mesh.vertices == noisy.records[i].mesh.vertices);
        for (const auto& [id, l] : clean.records[i].landmarks.points) {
            const Vec3 d = noisy.records[i].landmarks.at(id) - l.position;
            ss += d.squaredNorm();
            n += 3;
        }
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    CHECK(sd == doctest::Approx(15.0).epsilon(0.1));
}

TEST_CASE("synth: parameters are validated")
{
    SynthParams p;
    p.n_subjects = 0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p.n_subjects = 1;
    p.landmark_noise_mm = -1;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("dataset: write and load")
{
    SynthParams p;
    p.n_subjects = 3;
    const Dataset ds = synth_population(p);
    const auto dir = testing_support::temp_dir("dataset");
    write_dataset(dir, ds);
    const Dataset back = load_dataset(dir);
    REQUIRE(back.records.size() == ds.records.size());
    CHECK(back.subject_ids() == ds.subject_ids());
    const auto* r = back.find("S0002", Pose::Sitting);
    REQUIRE(r);
    CHECK(r->mesh.vertices.size() == ds.find("S0002", Pose::Sitting)->mesh.vertices.size());
    std::filesystem::remove_all(dir);
}

TEST_CASE("validate: default synthetic subjects pass every descriptor")
{
    SynthParams p;
    p.n_subjects = 5;
    p.seed = 11;
    const Dataset ds = synth_population(p);
    for (const auto& r : ds.records) {
        const auto rep = validate_subject(r.mesh, r.landmarks);
        for (auto t : kAllDescriptorTypes) CHECK(rep.checks.at(t).status == CheckStatus::Pass);
    }
}

TEST_CASE("validate: missing Rt Tragion fails the face pipeline")
{
    SynthParams p;
    p.n_subjects = 1;
    const Dataset ds = synth_population(p);
    LandmarkSet lms = ds.records[0].landmarks;
    lms.points.erase(lm::RtTragion);
    const auto rep = validate_subject(ds.records[0].mesh, lms);
    const auto& face = rep.checks.at(DescriptorType::FacePca);
    CHECK(face.status == CheckStatus::Fail);
    REQUIRE(!face.reasons.empty());
    CHECK(face.reasons[0] == "missing Rt Tragion");
    CHECK(rep.checks.at(DescriptorType::ShEnergy).status == CheckStatus::Pass);
}

TEST_CASE("validate: head with the top cap removed is at risk")
{
    SynthParams p;
    p.n_subjects = 1;
    const Dataset ds = synth_population(p);
    const auto& r = ds.records[0];
    const Mesh head = crop_head(r.mesh, r.landmarks);
    const Vec3 c = 0.5 * (r.landmarks.at(lm::RtTragion) + r.landmarks.at(lm::LtTragion));
    // Drop every direction within the top 40% of solid angle about the ear midpoint.
    const Mesh capped = filter_vertices(r.mesh, [&](const Vec3& v, std::size_t) {
        const Vec3 d = v - c;
        return d.y() <= 0.2 * d.norm();
    });
    const double coverage_oracle = [&] {
        // Independent bin count: 16 equal-area bands x 32 sectors about +Y.
        const Mesh h = crop_head(capped, r.landmarks);
        const Vec3 hc = c;
        std::vector<int> hit(16 * 32, 0);
        for (const auto& v : h.vertices) {
            const Vec3 d = (v - hc).normalized();
            const int band = std::min(15, static_cast<int>((1.0 - d.y()) * 8.0));
            const double phi = std::atan2(d.x(), d.z()) + std::numbers::pi;
            const int sector = std::min(31, static_cast<int>(phi / (2 * std::numbers::pi) * 32));
            hit[band * 32 + sector] = 1;
        }
        int n = 0;
        for (int b : hit) n += b;
        return n / 512.0;
    }();
    const auto rep = validate_subject(capped, r.landmarks);
    CHECK(rep.head_coverage == doctest::Approx(coverage_oracle));
    CHECK(rep.head_coverage < 0.7);
    const auto& sh = rep.checks.at(DescriptorType::ShEnergy);
    CHECK(sh.status == CheckStatus::AtRisk);
    REQUIRE(!sh.reasons.empty());
    CHECK(sh.reasons[0] == "at-risk: low coverage");
}
