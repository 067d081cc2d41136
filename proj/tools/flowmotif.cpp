// flowmotif command-line driver: synth -> motifs/zscores -> fingerprint ->
// cluster/pca. Exit codes: 0 success, 1 internal error, 2 input/domain error.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "flowmotif/flowmotif.hpp"

namespace fs = std::filesystem;
using namespace flowmotif;

namespace {

struct Options {
    int k = 3;
    double tmax = 5.0;
    std::size_t replicates = 1000;
    std::uint64_t seed = 0;
    std::string null_model = "touch-shuffle-match";
    std::size_t clusters = 4;
    std::size_t pca_dims = 2;
    bool pca_standardize = false;
    std::string format;
    std::string out;
    std::string teams;
    std::vector<std::string> inputs;
};

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return hex.str();
}

// Files named on the command line, with directories expanded to their
// .csv/.jsonl/.ndjson entries in path order.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const auto& item : inputs) {
        const fs::path path(item);
        if (fs::is_directory(path)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::directory_iterator(path)) {
                const auto ext = entry.path().extension().string();
                if (entry.is_regular_file() && (ext == ".csv" || ext == ".jsonl" || ext == ".ndjson"))
                    found.push_back(entry.path());
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::exists(path)) {
            files.push_back(path);
        } else {
            throw IoError("input '" + item + "' does not exist");
        }
    }
    return files;
}

// Parses every input; prints diagnostics and fails with an input error if any
// record was rejected.
std::vector<MatchEventLog> load_logs(const std::vector<fs::path>& files, const Options& opt) {
    std::vector<PassEvent> events;
    std::size_t rejected = 0;
    for (const auto& file : files) {
        const auto format = opt.format.empty() ? format_for_path(file) : parse_input_format(opt.format);
        auto parsed = parse_pass_file(file, format);
        for (const auto& d : parsed.diagnostics)
            std::cerr << file.string() << ": " << d.to_string() << '\n';
        rejected += parsed.diagnostics.size();
        events.insert(events.end(), std::make_move_iterator(parsed.events.begin()),
                      std::make_move_iterator(parsed.events.end()));
    }
    if (rejected > 0)
        throw FormatError(std::to_string(rejected) + " malformed pass record(s)");
    return group_by_match(events);
}

// Writes through `fn` to a file, or to stdout when `path` is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
    if (path.empty()) {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    if (const auto parent = fs::path(path).parent_path(); !parent.empty())
        fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    fn(out);
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

void write_text(const fs::path& path, const std::string& text) {
    emit(path.string(), [&](std::ostream& out) { out << text; });
}

fs::path output_dir(const Options& opt) {
    if (opt.out.empty())
        throw DomainError("--out <directory> is required for this command");
    fs::create_directories(opt.out);
    return fs::path(opt.out);
}

PipelineConfig pipeline_config(const Options& opt) {
    PipelineConfig config;
    config.k = opt.k;
    config.segmentation.t_max = opt.tmax;
    config.null.replicates = opt.replicates;
    config.null.master_seed = opt.seed;
    config.null.policy = parse_null_policy(opt.null_model);
    return config;
}

RunManifest manifest_for(const std::string& command, const Options& opt,
                         const std::vector<fs::path>& inputs) {
    RunManifest m;
    m.command = command;
    m.config["k"] = opt.k;
    m.config["t_max"] = opt.tmax;
    m.config["replicates"] = opt.replicates;
    m.config["seed"] = opt.seed;
    m.config["null_model"] = opt.null_model;
    m.config["clusters"] = opt.clusters;
    m.config["pca_dims"] = opt.pca_dims;
    m.config["pca_standardize"] = opt.pca_standardize;
    m.config["format"] = opt.format.empty() ? "auto" : opt.format;
    for (const auto& file : inputs)
        m.inputs.emplace_back(file.generic_string(), sha256_file(file));
    return m;
}

void finish_manifest(RunManifest& m, const fs::path& dir,
                     std::chrono::steady_clock::time_point started) {
    m.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_text(dir / "manifest.json", m.to_json().dump(2) + "\n");
}

std::vector<TeamFingerprint> load_fingerprints(const std::vector<fs::path>& files) {
    if (files.size() != 1)
        throw DomainError("expected exactly one fingerprint file");
    std::ifstream in(files.front(), std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + files.front().string() + "'");
    return read_fingerprints_csv(in);
}

int cmd_synth(const Options& opt) {
    const auto started = std::chrono::steady_clock::now();
    if (opt.teams.empty())
        throw DomainError("synth needs --teams <teams.json>");
    std::ifstream in(opt.teams);
    if (!in)
        throw IoError("cannot open '" + opt.teams + "'");
    auto styles = nlohmann::json::parse(in, nullptr, false);
    if (styles.is_discarded() || !styles.is_array())
        throw FormatError("--teams must hold a JSON array of team styles");
    std::vector<TeamStyleParams> teams;
    try {
        for (const auto& item : styles)
            teams.push_back(item.get<TeamStyleParams>());
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("team styles: ") + e.what());
    }
    for (const auto& t : teams) {
        t.validate(opt.k);
        if (t.team_id.find_first_of("/\\") != std::string::npos || t.team_id == "." ||
            t.team_id == "..")
            throw DomainError("team_id '" + t.team_id + "' is not usable as a file name");
    }

    const auto format = opt.format.empty() ? InputFormat::csv : parse_input_format(opt.format);
    const auto dir = output_dir(opt);
    const auto logs = generate_league(teams, opt.seed, opt.tmax);
    std::size_t cursor = 0;
    for (const auto& team : teams) {
        std::vector<PassEvent> events;
        for (int m = 0; m < team.matches; ++m, ++cursor)
            events.insert(events.end(), logs[cursor].events.begin(), logs[cursor].events.end());
        const auto name = team.team_id + (format == InputFormat::csv ? ".csv" : ".jsonl");
        emit((dir / name).string(),
             [&](std::ostream& out) { write_pass_events(out, events, format); });
    }
    auto manifest = manifest_for("synth", opt, {fs::path(opt.teams)});
    finish_manifest(manifest, dir, started);
    return 0;
}

int cmd_motifs(const Options& opt) {
    const auto logs = load_logs(expand_inputs(opt.inputs), opt);
    const auto config = pipeline_config(opt);
    std::vector<MotifCountVector> rows;
    rows.reserve(logs.size());
    for (const auto& log : logs)
        rows.push_back(count_match_motifs(log, config));
    emit(opt.out, [&](std::ostream& out) { write_motif_counts_csv(out, rows); });
    return 0;
}

int cmd_zscores(const Options& opt) {
    const auto started = std::chrono::steady_clock::now();
    const auto files = expand_inputs(opt.inputs);
    const auto logs = load_logs(files, opt);
    const auto analyses = analyze_matches(logs, pipeline_config(opt), thread_count());
    if (opt.out.empty()) {
        write_zscores_csv(std::cout, analyses);
        return 0;
    }
    const auto dir = output_dir(opt);
    emit((dir / "zscores.csv").string(),
         [&](std::ostream& out) { write_zscores_csv(out, analyses); });
    auto manifest = manifest_for("zscores", opt, files);
    finish_manifest(manifest, dir, started);
    return 0;
}

int cmd_fingerprint(const Options& opt) {
    std::vector<ZScoreProfile> profiles;
    for (const auto& file : expand_inputs(opt.inputs)) {
        std::ifstream in(file, std::ios::binary);
        if (!in)
            throw IoError("cannot open '" + file.string() + "'");
        auto part = read_zscores_csv(in);
        profiles.insert(profiles.end(), part.begin(), part.end());
    }
    const auto fps = fingerprints_by_team(profiles);
    emit(opt.out, [&](std::ostream& out) { write_fingerprints_csv(out, fps); });
    return 0;
}

void write_pca(const fs::path& dir, const std::vector<TeamFingerprint>& fps,
               const PcaProjection& pca, const std::vector<int>& labels) {
    emit((dir / "pca.csv").string(), [&](std::ostream& out) { write_pca_csv(out, pca); });
    write_text(dir / "pca.json", to_json(pca, fps.front().patterns).dump(2) + "\n");
    write_text(dir / "pca.svg", svg::pca_scatter(pca, labels));
}

int cmd_cluster(const Options& opt) {
    const auto started = std::chrono::steady_clock::now();
    const auto files = expand_inputs(opt.inputs);
    const auto fps = load_fingerprints(files);
    if (fps.size() < 2)
        throw DomainError("clustering needs at least two teams, got " + std::to_string(fps.size()));
    const auto assignment = kmeans(fps, KMeansOptions{opt.clusters, opt.seed});
    const auto tree = ward_cluster(fps);
    const auto pca = pca_project(fps, PcaOptions{opt.pca_dims, opt.pca_standardize});

    const auto dir = output_dir(opt);
    emit((dir / "clusters.csv").string(),
         [&](std::ostream& out) { write_clusters_csv(out, assignment); });
    write_text(dir / "cluster_summary.json",
               to_json(assignment, fps.front().patterns).dump(2) + "\n");
    write_text(dir / "dendrogram.json", to_json(tree).dump(2) + "\n");
    write_text(dir / "dendrogram.svg", svg::dendrogram(tree));
    write_pca(dir, fps, pca, assignment.labels);
    auto manifest = manifest_for("cluster", opt, files);
    finish_manifest(manifest, dir, started);
    return 0;
}

int cmd_pca(const Options& opt) {
    const auto started = std::chrono::steady_clock::now();
    const auto files = expand_inputs(opt.inputs);
    const auto fps = load_fingerprints(files);
    const auto pca = pca_project(fps, PcaOptions{opt.pca_dims, opt.pca_standardize});
    const auto dir = output_dir(opt);
    write_pca(dir, fps, pca, {});
    auto manifest = manifest_for("pca", opt, files);
    finish_manifest(manifest, dir, started);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"flowmotif: flow-motif analysis of pass-event logs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Options opt;
    app.add_option("--k", opt.k, "passes per motif")->capture_default_str();
    app.add_option("--tmax", opt.tmax, "max seconds between passes of one possession")
        ->capture_default_str();
    app.add_option("--replicates", opt.replicates, "null-model replicates per match")
        ->capture_default_str();
    app.add_option("--seed", opt.seed, "master seed")->capture_default_str();
    app.add_option("--null-model", opt.null_model, "null model policy")
        ->check(CLI::IsMember({"touch-shuffle-match", "touch-shuffle-possession", "uniform-walk"}))
        ->capture_default_str();
    app.add_option("--clusters", opt.clusters, "k-means cluster count")->capture_default_str();
    app.add_option("--pca-dims", opt.pca_dims, "principal components to keep")
        ->capture_default_str();
    app.add_flag("--pca-standardize", opt.pca_standardize, "scale features to unit variance");
    app.add_option("--format", opt.format, "pass log format (default: by file extension)")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    app.add_option("--out", opt.out, "output file or directory");

    auto* synth = app.add_subcommand("synth", "generate a synthetic league");
    synth->add_option("--teams", opt.teams, "JSON array of team styles")->required();
    auto* motifs = app.add_subcommand("motifs", "count motifs per match");
    auto* zscores = app.add_subcommand("zscores", "motif z-scores against the null model");
    auto* fingerprint = app.add_subcommand("fingerprint", "average z-scores per team");
    auto* cluster = app.add_subcommand("cluster", "k-means, Ward and PCA on fingerprints");
    auto* pca = app.add_subcommand("pca", "PCA projection of fingerprints");
    for (auto* sub : {motifs, zscores, fingerprint, cluster, pca})
        sub->add_option("inputs", opt.inputs, "input files or directories");
    for (auto* sub : {synth, motifs, zscores, fingerprint, cluster, pca})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*synth)
            return cmd_synth(opt);
        if (*motifs)
            return cmd_motifs(opt);
        if (*zscores)
            return cmd_zscores(opt);
        if (*fingerprint)
            return cmd_fingerprint(opt);
        if (*cluster)
            return cmd_cluster(opt);
        if (*pca)
            return cmd_pca(opt);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "flowmotif: " << e.what() << '\n';
        return 2;
    } catch (const InputError& e) {
        std::cerr << "flowmotif: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "flowmotif: internal error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
