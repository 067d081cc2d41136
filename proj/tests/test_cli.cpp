#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("flowmotif_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    // Runs the CLI from inside the scratch directory with an optional
    // environment prefix, capturing stdout and stderr.
    Outcome run(const std::string& args, const std::string& env = "") const {
        const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" FLOWMOTIF_CLI "' " +
                                args + " > stdout.txt 2> stderr.txt";
        Outcome r;
        const int raw = std::system(cmd.c_str());
        r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
        r.out = slurp(dir_ / "stdout.txt");
        r.err = slurp(dir_ / "stderr.txt");
        return r;
    }

    void write(const std::string& name, const std::string& text) const {
        fs::create_directories((dir_ / name).parent_path());
        std::ofstream(dir_ / name, std::ios::binary) << text;
    }

    fs::path dir_;
};

const std::string kTeams = R"([
  {"team_id": "A", "matches": 3, "possessions_per_match": 40},
  {"team_id": "B", "matches": 3, "possessions_per_match": 40, "back_pass_bias": 0.5},
  {"team_id": "C", "matches": 3, "possessions_per_match": 40}
])";

} // namespace

TEST_F(Cli, MotifsOnWorkedExample) {
    const auto r = run("motifs '" FLOWMOTIF_SAMPLES "/worked_example.csv'");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, "match_id,team_id,k,pattern,count\n"
                     "M1,T1,3,ABAB,0\nM1,T1,3,ABAC,0\nM1,T1,3,ABCA,1\nM1,T1,3,ABCB,1\nM1,T1,3,ABCD,1\n");
}

TEST_F(Cli, MotifsFromJsonLines) {
    write("m.jsonl", R"({"match_id":"M","team_id":"T","passer":1,"receiver":2,"timestamp_s":0})" "\n"
                     R"({"match_id":"M","team_id":"T","passer":2,"receiver":1,"timestamp_s":1})" "\n"
                     R"({"match_id":"M","team_id":"T","passer":1,"receiver":3,"timestamp_s":2})" "\n");
    const auto r = run("motifs --k 2 m.jsonl");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, "match_id,team_id,k,pattern,count\nM,T,2,ABA,1\nM,T,2,ABC,1\n");
}

TEST_F(Cli, EmptyDirectoryGivesHeaderOnly) {
    fs::create_directories(dir_ / "empty");
    const auto r = run("motifs empty");
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out, "match_id,team_id,k,pattern,count\n");
}

TEST_F(Cli, MalformedRecordIsAnInputError) {
    write("bad.csv", "match_id,team_id,passer,receiver,timestamp_s\nM,T,1,2,0\nM,T,2,2,1\n");
    const auto r = run("motifs bad.csv --out counts.csv");
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("line=3"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(dir_ / "counts.csv"));
}

TEST_F(Cli, MissingInputAndBadOptions) {
    EXPECT_EQ(run("motifs nowhere.csv").status, 2);
    EXPECT_EQ(run("motifs --k 0 '" FLOWMOTIF_SAMPLES "/worked_example.csv'").status, 2);
    EXPECT_EQ(run("motifs --k 11 '" FLOWMOTIF_SAMPLES "/worked_example.csv'").status, 2);
    EXPECT_EQ(run("zscores --null-model shuffle_everything '" FLOWMOTIF_SAMPLES
                  "/worked_example.csv'").status,
              2);
    EXPECT_EQ(run("frobnicate").status, 2);
}

TEST_F(Cli, SingleReplicateFlagsEveryRow) {
    const auto r = run("zscores --replicates 1 '" FLOWMOTIF_SAMPLES "/worked_example.csv'");
    ASSERT_EQ(r.status, 0) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        EXPECT_EQ(line.back(), '1') << line;
    }
    EXPECT_EQ(rows, 5);
}

TEST_F(Cli, PipelineProducesAllArtifacts) {
    write("teams.json", kTeams);
    ASSERT_EQ(run("synth --teams teams.json --seed 3 --out league").status, 0);
    EXPECT_TRUE(fs::exists(dir_ / "league" / "A.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "league" / "manifest.json"));

    auto r = run("zscores league --replicates 40 --seed 3 --out z");
    ASSERT_EQ(r.status, 0) << r.err;
    const auto manifest = nlohmann::json::parse(slurp(dir_ / "z" / "manifest.json"));
    EXPECT_EQ(manifest["command"], "zscores");
    EXPECT_EQ(manifest["inputs"].size(), 3u);
    EXPECT_EQ(manifest["inputs"][0]["sha256"].get<std::string>().size(), 64u);

    ASSERT_EQ(run("fingerprint z/zscores.csv --out fp.csv").status, 0);
    r = run("cluster fp.csv --clusters 2 --out clusters");
    ASSERT_EQ(r.status, 0) << r.err;
    for (const char* name : {"clusters.csv", "cluster_summary.json", "dendrogram.json",
                             "dendrogram.svg", "pca.csv", "pca.json", "pca.svg", "manifest.json"})
        EXPECT_TRUE(fs::exists(dir_ / "clusters" / name)) << name;
    EXPECT_EQ(slurp(dir_ / "clusters" / "clusters.csv").substr(0, 16), "team_id,cluster\n");

    ASSERT_EQ(run("pca fp.csv --pca-dims 3 --pca-standardize --out p").status, 0);
    EXPECT_EQ(slurp(dir_ / "p" / "pca.csv").substr(0, 20), "team_id,pc1,pc2,pc3\n");
}

TEST_F(Cli, ZScoresIgnoreThreadCount) {
    write("teams.json", kTeams);
    ASSERT_EQ(run("synth --teams teams.json --out league").status, 0);
    const auto one = run("zscores league --replicates 30", "FLOWMOTIF_THREADS=1");
    const auto four = run("zscores league --replicates 30", "FLOWMOTIF_THREADS=4");
    ASSERT_EQ(one.status, 0) << one.err;
    EXPECT_EQ(one.out, four.out);
    EXPECT_GT(one.out.size(), 100u);
}

TEST_F(Cli, ClusteringNeedsEnoughTeams) {
    write("one.csv", "team_id,k,matches_used,ABAB,ABAC,ABCA,ABCB,ABCD\nX,3,1,1,2,3,4,5\n");
    EXPECT_EQ(run("cluster one.csv --out c").status, 2);
    write("two.csv", "team_id,k,matches_used,ABAB,ABAC,ABCA,ABCB,ABCD\n"
                     "X,3,1,1,2,3,4,5\nY,3,1,0,0,0,0,0\n");
    EXPECT_EQ(run("cluster two.csv --clusters 4 --out c").status, 2);
    EXPECT_EQ(run("cluster two.csv --clusters 2 --out c").status, 0);
}

TEST_F(Cli, OutputDirectoryRequired) {
    write("teams.json", kTeams);
    EXPECT_EQ(run("synth --teams teams.json").status, 2);
}
