#include "sblearn/generator.hpp"
#include "sblearn/json_io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace sblearn;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw UsageError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void write_text(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n')
            std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out)
        throw UsageError("cannot write " + out_path);
    out << text;
    if (text.empty() || text.back() != '\n')
        out << '\n';
}

CounterexampleStrategy parse_strategy(const std::string& text, std::uint64_t default_seed) {
    if (text == "simplest")
        return CounterexampleStrategy::simplest();
    if (text == "boundary")
        return CounterexampleStrategy::boundary_adjacent();
    if (text == "random")
        return CounterexampleStrategy::seeded_random(default_seed);
    if (text.rfind("deep:", 0) == 0)
        return CounterexampleStrategy::deep(Int(text.substr(5)));
    if (text.rfind("random:", 0) == 0)
        return CounterexampleStrategy::seeded_random(std::stoull(text.substr(7)));
    throw UsageError("unknown strategy '" + text +
                     "' (expected simplest, boundary, deep:N or random:SEED)");
}

TranscriptSink stderr_sink() {
    return [](const TranscriptEntry& t) { std::cerr << to_json(t).dump() << '\n'; };
}

Word parse_word(const std::vector<std::string>& args) {
    Word w;
    for (const std::string& arg : args) {
        std::istringstream split(arg);
        std::string token;
        while (split >> token)
            w.push_back(Rational::parse(token));
    }
    for (const Rational& q : w)
        if (q.is_infinite())
            throw UsageError("word symbols must be finite rationals");
    return w;
}

// "a..b" doubling grid, or a single value
std::vector<unsigned> parse_grid(const std::string& text) {
    auto dots = text.find("..");
    if (dots == std::string::npos)
        return {static_cast<unsigned>(std::stoul(text))};
    unsigned lo = static_cast<unsigned>(std::stoul(text.substr(0, dots)));
    unsigned hi = static_cast<unsigned>(std::stoul(text.substr(dots + 2)));
    if (lo == 0 || hi < lo)
        throw UsageError("bad grid '" + text + "'");
    std::vector<unsigned> out;
    for (unsigned v = lo; v <= hi; v *= 2)
        out.push_back(v);
    return out;
}

int cmd_learn_pwf(const std::string& target_path, const std::string& strategy_text,
                  std::uint64_t seed, const std::string& out_path, bool verbose) {
    PiecewiseFunction target = piecewise_from_json(load_json_file(target_path)).canonicalize();
    CounterexampleStrategy strategy = parse_strategy(strategy_text, seed);
    auto teacher = make_simulated_teacher(target, strategy);
    if (verbose) {
        teacher.mq.set_transcript_sink(stderr_sink());
        teacher.eq.set_transcript_sink(stderr_sink());
    }
    LearnerReport report = learn(teacher.mq, teacher.eq);
    Json out = to_json(report);
    out["strategy"] = strategy_text;
    out["seed"] = seed;
    bool verified = report.result == target;
    out["verified"] = verified;
    write_text(out_path, out.dump(2));
    return verified ? 0 : 1;
}

int cmd_learn_sfa(const std::string& target_path, std::uint64_t seed,
                  const std::string& out_path, bool verbose) {
    Sfa target = sfa_from_json(load_json_file(target_path));
    auto teacher = make_sfa_teacher(target);
    if (verbose) {
        teacher.mq.set_transcript_sink(stderr_sink());
        teacher.eq.set_transcript_sink(stderr_sink());
    }
    SfaLearnerReport report = learn_sfa(teacher.mq, teacher.eq);
    bool verified =
        !find_accepted_word(product(target, report.result, Combine::difference)).has_value();
    Json out = to_json(report);
    out["seed"] = seed;
    out["verified"] = verified;
    write_text(out_path, out.dump(2));
    return verified ? 0 : 1;
}

int cmd_run(const std::string& sfa_path, const std::vector<std::string>& word_args) {
    Sfa a = sfa_from_json(load_json_file(sfa_path));
    Word w = parse_word(word_args);
    RunResult res = run(a, w);
    std::cout << (res.accepted ? "accept" : "reject") << '\n';
    std::cout << "trace:";
    for (const State& s : res.visited)
        std::cout << ' ' << s;
    std::cout << '\n';
    return 0;
}

int cmd_export_dot(const std::string& sfa_path, const std::string& out_path) {
    Sfa a = sfa_from_json(load_json_file(sfa_path));
    write_text(out_path, to_dot(a));
    return 0;
}

int cmd_bench(const std::string& pieces_grid, const std::string& bits_grid, unsigned seeds,
              std::uint64_t seed, const std::string& strategy_text, const std::string& format,
              bool no_timing, const std::string& out_path) {
    std::vector<unsigned> pieces = parse_grid(pieces_grid);
    std::vector<unsigned> bits = parse_grid(bits_grid);
    struct Record {
        unsigned pieces, bits;
        std::uint64_t seed;
        std::size_t size, mq, eq, links;
        long long wall_ms;
    };
    std::vector<Record> records;
    for (unsigned k : pieces)
        for (unsigned b : bits)
            for (unsigned i = 0; i < seeds; ++i) {
                std::seed_seq seq{seed, static_cast<std::uint64_t>(k),
                                  static_cast<std::uint64_t>(b),
                                  static_cast<std::uint64_t>(i)};
                std::mt19937_64 rng(seq);
                PiecewiseFunction target = random_piecewise_exact(rng, k, b);
                CounterexampleStrategy strategy = parse_strategy(strategy_text, seed + i);
                auto teacher = make_simulated_teacher(target, strategy);
                auto start = std::chrono::steady_clock::now();
                LearnerReport report = learn(teacher.mq, teacher.eq);
                auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - start)
                                .count();
                if (report.result != target)
                    throw TeacherInconsistency("bench: learned function differs from target");
                records.push_back({k, b, seed + i, target.size_bits(), report.mq_count,
                                   report.eq_count, report.break_links_found,
                                   no_timing ? 0 : wall});
            }
    std::sort(records.begin(), records.end(), [](const Record& a, const Record& b) {
        return std::tie(a.pieces, a.bits, a.seed) < std::tie(b.pieces, b.bits, b.seed);
    });

    std::vector<double> ratios;
    for (const Record& r : records)
        ratios.push_back(static_cast<double>(r.mq) / static_cast<double>(r.size));
    std::sort(ratios.begin(), ratios.end());
    double max_ratio = ratios.empty() ? 0.0 : ratios.back();
    double median_ratio = ratios.empty() ? 0.0 : ratios[ratios.size() / 2];

    std::string text;
    if (format == "csv") {
        std::ostringstream csv;
        csv << "pieces,bits,seed,strategy,size,mq,eq,break_links,wall_ms\n";
        for (const Record& r : records)
            csv << r.pieces << ',' << r.bits << ',' << r.seed << ',' << strategy_text << ','
                << r.size << ',' << r.mq << ',' << r.eq << ',' << r.links << ',' << r.wall_ms
                << '\n';
        text = csv.str();
    } else if (format == "json") {
        Json out;
        out["records"] = Json::array();
        for (const Record& r : records)
            out["records"].push_back(Json{{"pieces", r.pieces},
                                          {"bits", r.bits},
                                          {"seed", r.seed},
                                          {"strategy", strategy_text},
                                          {"size", r.size},
                                          {"mq", r.mq},
                                          {"eq", r.eq},
                                          {"break_links", r.links},
                                          {"wall_ms", r.wall_ms}});
        out["summary"] = Json{{"max_mq_per_size", max_ratio},
                              {"median_mq_per_size", median_ratio},
                              {"runs", records.size()}};
        text = out.dump(2);
    } else {
        throw UsageError("unknown format '" + format + "' (expected csv or json)");
    }
    write_text(out_path, text);
    std::cerr << "bench: runs=" << records.size() << " max mq/size=" << max_ratio
              << " median mq/size=" << median_ratio << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact learner for piecewise functions and symbolic automata over the rationals"};
    app.require_subcommand(1);

    std::string target_path, out_path, strategy_text = "simplest", format = "csv";
    std::string pieces_grid = "2..64", bits_grid = "4..32";
    std::uint64_t seed = 42;
    unsigned seeds = 3;
    bool verbose = false, no_timing = false;
    std::vector<std::string> word_args;

    CLI::App* learn_pwf = app.add_subcommand("learn-pwf", "learn a piecewise function target");
    learn_pwf->add_option("target", target_path, "target representation JSON")->required();
    learn_pwf->add_option("--strategy", strategy_text,
                          "counterexample strategy: simplest, boundary, deep:N, random:SEED");
    learn_pwf->add_option("--seed", seed, "seed for the random strategy");
    learn_pwf->add_option("--out", out_path, "write the report here instead of stdout");
    learn_pwf->add_flag("--verbose", verbose, "log every oracle call to stderr");

    CLI::App* learn_sfa_cmd = app.add_subcommand("learn-sfa", "learn a symbolic automaton target");
    learn_sfa_cmd->add_option("target", target_path, "target SFA JSON")->required();
    learn_sfa_cmd->add_option("--seed", seed, "seed echoed into the report");
    learn_sfa_cmd->add_option("--out", out_path, "write the report here instead of stdout");
    learn_sfa_cmd->add_flag("--verbose", verbose, "log every oracle call to stderr");

    CLI::App* run_cmd = app.add_subcommand("run", "run an SFA on a word");
    run_cmd->add_option("sfa", target_path, "SFA JSON")->required();
    run_cmd->add_option("word", word_args, "whitespace-separated rational symbols");

    CLI::App* dot_cmd = app.add_subcommand("export-dot", "emit an SFA as Graphviz DOT");
    dot_cmd->add_option("sfa", target_path, "SFA JSON")->required();
    dot_cmd->add_option("--out", out_path, "write the DOT here instead of stdout");

    CLI::App* bench_cmd = app.add_subcommand("bench", "query-complexity sweep over random targets");
    bench_cmd->add_option("--pieces", pieces_grid, "piece-count grid, e.g. 2..64 (doubling)");
    bench_cmd->add_option("--bits", bits_grid, "endpoint bit-size grid, e.g. 4..32 (doubling)");
    bench_cmd->add_option("--seeds", seeds, "targets per grid cell");
    bench_cmd->add_option("--seed", seed, "base seed; all randomness flows from it");
    bench_cmd->add_option("--strategy", strategy_text, "counterexample strategy");
    bench_cmd->add_option("--format", format, "csv or json");
    bench_cmd->add_flag("--no-timing", no_timing, "zero the wall_ms column for bit-exact output");
    bench_cmd->add_option("--out", out_path, "write records here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand("learn-pwf"))
            return cmd_learn_pwf(target_path, strategy_text, seed, out_path, verbose);
        if (app.got_subcommand("learn-sfa"))
            return cmd_learn_sfa(target_path, seed, out_path, verbose);
        if (app.got_subcommand("run"))
            return cmd_run(target_path, word_args);
        if (app.got_subcommand("export-dot"))
            return cmd_export_dot(target_path, out_path);
        if (app.got_subcommand("bench"))
            return cmd_bench(pieces_grid, bits_grid, seeds, seed, strategy_text, format,
                             no_timing, out_path);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const TeacherInconsistency& e) {
        std::cerr << "self-check failed: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
