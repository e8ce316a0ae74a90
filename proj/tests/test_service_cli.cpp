#include "anthro/cli.hpp"
#include "anthro/errors.hpp"
#include "anthro/service.hpp"

#include "support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <cstdio>
#include <cstdlib>
#include <future>
#include <set>
#include <sys/wait.h>
#include <sstream>

using namespace anthro;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = cli_dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

const std::filesystem::path& fixture()
{
    static const std::filesystem::path dir = [] {
        auto root = testing_support::temp_dir("svc") / "pop";
        REQUIRE(cli({"synth", "--n", "12", "--seed", "4", "--noise-mm", "0", "--out", root.string()}).code == 0);
        for (const char* t : {"distance15", "face-pca", "sh-energy"})
            REQUIRE(cli({"extract", "--dataset", root.string(), "--type", t}).code == 0);
        return root;
    }();
    return dir;
}

const Catalog& catalog()
{
    static const Catalog c = Catalog::open(fixture());
    return c;
}

ApiResponse get(const std::string& path, std::multimap<std::string, std::string> params = {})
{
    ApiRequest r;
    r.path = path;
    r.params = std::move(params);
    return handle_api(catalog(), r);
}

ApiResponse post_query(const std::string& body)
{
    ApiRequest r;
    r.method = "POST";
    r.path = "/api/query";
    r.body = body;
    return handle_api(catalog(), r);
}

} // namespace

TEST_CASE("cli: synth writes subjects by poses")
{
    const auto dir = testing_support::temp_dir("cli_synth") / "d";
    const auto r = cli({"synth", "--n", "4", "--seed", "1", "--out", dir.string()});
    CHECK(r.code == 0);
    int subjects = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_directory()) {
            ++subjects;
            CHECK(std::filesystem::exists(e.path() / "standing.obj"));
            CHECK(std::filesystem::exists(e.path() / "sitting.obj"));
        }
    CHECK(subjects == 4);
    CHECK(std::filesystem::exists(dir / "landmarks.csv"));
    std::filesystem::remove_all(dir.parent_path());
}

TEST_CASE("cli: usage errors exit 1 with help")
{
    const auto r = cli({"extract", "--type", "distance15"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--dataset") != std::string::npos);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(cli({}).code == 1);
    CHECK(cli({"bogus"}).code == 1);
    CHECK(cli({"query", "--dataset", "x", "--type", "nope", "--subject", "A"}).code == 1);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("cli: data errors exit 2")
{
    CHECK(cli({"extract", "--dataset", "/nonexistent/dir", "--type", "distance15"}).code == 2);
    CHECK(cli({"query", "--dataset", fixture().string(), "--type", "distance15", "--subject", "NOPE"}).code == 2);
    CHECK(cli({"cmc", "--dataset", fixture().string(), "--type", "silhouette48"}).code == 2);
}

TEST_CASE("cli: noise-free cmc has rank-1 of one")
{
    const auto r = cli({"cmc", "--dataset", fixture().string(), "--gallery", "standing", "--probe", "sitting", "--type",
                        "distance15", "--metric", "l2"});
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK(j["rank1"] == 1.0);
    CHECK(j["gallery_size"] == 12);
    CHECK(j["probe_count"] == 12);
    CHECK(j["metric"] == "l2");
    CHECK(j["descriptor_type"] == "distance15");
    CHECK(std::filesystem::exists(fixture() / "results" / "cmc_distance15_l2.csv"));
}

TEST_CASE("cli: cluster and validate")
{
    const auto r = cli({"cluster", "--dataset", fixture().string(), "--type", "sh-energy", "--metric", "l1", "--linkage",
                        "complete", "--k", "3"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("subject_id,cluster\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 13);
    const auto v = cli({"validate", "--dataset", fixture().string()});
    CHECK(v.code == 0);
    CHECK(std::count(v.out.begin(), v.out.end(), '\n') == 24);
}

TEST_CASE("api: datasets and subjects")
{
    const auto r = get("/api/datasets");
    CHECK(r.status == 200);
    const auto j = Json::parse(r.body);
    REQUIRE(j.is_array());
    CHECK(j.size() == 1);
    CHECK(j[0]["id"] == "pop");
    CHECK(j[0]["subject_count"] == 12);
    const auto s = Json::parse(get("/api/datasets/pop/subjects").body);
    CHECK(s.size() == 12);
    CHECK(get("/api/datasets/none/subjects").status == 404);
    const auto subj = get("/api/subjects/S0003", {{"pose", "sitting"}});
    CHECK(subj.status == 200);
    CHECK(Json::parse(subj.body)["descriptors"].contains("distance15"));
}

TEST_CASE("api: query errors")
{
    const auto r = post_query(R"({"type":"distance15","metric":"l2","subject_id":"GHOST","pose":"standing","k":3})");
    CHECK(r.status == 404);
    CHECK(r.body.find("GHOST") != std::string::npos);
    CHECK(post_query("not json").status == 400);
    CHECK(post_query(R"({"type":"distance15","subject_id":"S0001","k":0})").status == 400);
    CHECK(post_query(R"({"type":"distance15","subject_id":"S0001","vector":[1],"k":1})").status == 400);
    CHECK(post_query(R"({"type":"distance15","metric":"mahalanobis","subject_id":"S0001","k":1})").status == 400);
    CHECK(post_query(R"({"type":"silhouette48","subject_id":"S0001","k":1})").status == 404);
    CHECK(post_query(R"({"type":"distance15","vector":[1,2],"k":1})").status == 400);
    ApiRequest wrong;
    wrong.method = "GET";
    wrong.path = "/api/query";
    CHECK(handle_api(catalog(), wrong).status == 405);
    CHECK(get("/nothing").status == 404);
    CHECK(get("/api/clusters", {{"type", "distance15"}, {"k", "99"}}).status == 400);
}

TEST_CASE("api: query matches the cli")
{
    for (const auto& [type, metric] : std::vector<std::pair<std::string, std::string>>{
             {"distance15", "l1"}, {"distance15", "l2"}, {"face-pca", "mahalanobis"}, {"sh-energy", "l2"}}) {
        const auto api = post_query(R"({"type":")" + type + R"(","metric":")" + metric +
                                    R"(","subject_id":"S0005","pose":"sitting","gallery_pose":"standing","k":5})");
        REQUIRE(api.status == 200);
        const auto j = Json::parse(api.body);
        REQUIRE(j["matches"].size() == 5);
        for (std::size_t i = 1; i < 5; ++i)
            CHECK(j["matches"][i]["distance"].get<double>() >= j["matches"][i - 1]["distance"].get<double>());
        const auto c = cli({"query", "--dataset", fixture().string(), "--type", type, "--metric", metric, "--subject",
                            "S0005", "--pose", "sitting", "--gallery-pose", "standing", "--k", "5"});
        REQUIRE(c.code == 0);
        CHECK(c.out == api.body + "\n");
    }
}

TEST_CASE("api: cmc, clusters, dendrogram, mesh")
{
    const auto c = get("/api/cmc", {{"type", "distance15"}, {"metric", "l2"}, {"gallery", "standing"}, {"probe", "sitting"}});
    REQUIRE(c.status == 200);
    CHECK(Json::parse(c.body)["rank1"] == 1.0);

    const auto all = Json::parse(get("/api/clusters", {{"type", "distance15"}, {"k", "12"}}).body);
    std::set<int> labels;
    for (const auto& l : all["labels"]) labels.insert(l["cluster"].get<int>());
    CHECK(labels.size() == 12);
    const auto one = Json::parse(get("/api/clusters", {{"type", "distance15"}, {"k", "1"}}).body);
    for (const auto& l : one["labels"]) CHECK(l["cluster"] == 0);

    const auto d = get("/api/dendrogram", {{"type", "sh-energy"}, {"linkage", "single"}});
    REQUIRE(d.status == 200);
    CHECK(dendrogram_from_json(d.body).merges.size() == 11);
    const auto nw = get("/api/dendrogram", {{"type", "sh-energy"}, {"format", "newick"}});
    CHECK(nw.content_type == "text/plain");
    CHECK(nw.body.back() == ';');

    const auto m = get("/api/mesh/S0002/sitting");
    CHECK(m.status == 200);
    CHECK(m.body.rfind("v ", 0) == 0);
    CHECK(get("/api/mesh/S0002/lying").status == 400);
    CHECK(get("/api/mesh/NOPE/sitting").status == 404);
}

TEST_CASE("http: concurrent identical requests over a real socket")
{
    HttpServer server(catalog());
    const int port = server.start("127.0.0.1:0");
    REQUIRE(port > 0);
    const std::string body =
        R"({"type":"distance15","metric":"l2","subject_id":"S0007","pose":"standing","k":5})";
    auto fetch = [&] {
        httplib::Client client("127.0.0.1", port);
        auto res = client.Post("/api/query", body, "application/json");
        return res ? std::to_string(res->status) + res->body : std::string("no response");
    };
    std::vector<std::future<std::string>> jobs;
    for (int i = 0; i < 8; ++i) jobs.push_back(std::async(std::launch::async, fetch));
    const std::string first = jobs[0].get();
    CHECK(first.rfind("200", 0) == 0);
    for (std::size_t i = 1; i < jobs.size(); ++i) CHECK(jobs[i].get() == first);

    httplib::Client client("127.0.0.1", port);
    auto ds = client.Get("/api/datasets");
    REQUIRE(ds);
    CHECK(ds->status == 200);
    auto missing = client.Get("/api/subjects/NOPE");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    server.stop();
    server.wait();
    CHECK_THROWS_AS(HttpServer(catalog()).start("127.0.0.1:99999"), InvalidArgument);
}

TEST_CASE("binary: exit codes through a real process")
{
    const char* exe = std::getenv("ANTHRO_CLI");
    if (!exe) return;
    auto run = [&](const std::string& args) {
        const int status = std::system((std::string(exe) + " " + args + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    CHECK(run("extract --type distance15") == 1);
    CHECK(run("query --dataset " + fixture().string() + " --type distance15 --subject S0001 --k 3") == 0);
    CHECK(run("query --dataset " + fixture().string() + " --type distance15 --subject ZZ --k 3") == 2);
}
