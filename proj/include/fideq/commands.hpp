#pragma once

// Command implementations behind the `fideq` tool. Each returns the process
// exit code: 0 success, 1 input or usage error, 2 internal inconsistency.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fideq/conditions.hpp"
#include "fideq/error.hpp"
#include "fideq/fidelity.hpp"
#include "fideq/generator.hpp"
#include "fideq/io.hpp"
#include "fideq/selftest.hpp"
#include "fideq/states.hpp"

namespace fideq::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kInconsistent = 2 };

/// Global/local fidelity inequality may be violated by roundoff only below this.
inline constexpr double kInequalitySlack = 1e-10;

struct CheckOptions {
    std::filesystem::path psiFile;
    std::filesystem::path phiFile;
    double tol = kDefaultConditionTolerance;
    double gapTol = kDefaultGapTolerance;
};

struct PairEvaluation {
    FidelityPair fidelities;
    FramedCheck framed;
    bool verdictNumeric = false;
};

inline PairEvaluation evaluate_pair(const BipartitePureState& psi, const BipartitePureState& phi, double tol,
                                    double gapTol) {
    PairEvaluation e{fidelity_pair(psi, phi), check_pair(psi, phi, tol), false};
    e.verdictNumeric = std::abs(e.fidelities.gap()) <= gapTol;
    return e;
}

inline int cmd_check(const CheckOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        detail::require_tolerance(opt.tol);
        detail::require_tolerance(opt.gapTol);
        const auto psi = io::state_from_json(io::read_json_file(opt.psiFile));
        const auto phi = io::state_from_json(io::read_json_file(opt.phiFile));
        const PairEvaluation e = evaluate_pair(psi, phi, opt.tol, opt.gapTol);
        const io::Json report{{"fGlobal", e.fidelities.fGlobal},
                              {"fLocal", e.fidelities.fLocal},
                              {"gap", e.fidelities.gap()},
                              {"lambda", e.framed.frame.lambda},
                              {"verdictNumeric", e.verdictNumeric},
                              {"conditions", io::report_to_json(e.framed.report)}};
        out << report.dump(2) << '\n';
        if (e.verdictNumeric != e.framed.report.verdict) {
            err << "fideq check: numeric verdict and condition verdict disagree\n";
            return kInconsistent;
        }
        return kOk;
    } catch (const std::exception& ex) {
        err << "fideq check: " << ex.what() << '\n';
        return kInputError;
    }
}

struct ScanOptions {
    std::size_t dimB = 2;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    double tol = kDefaultConditionTolerance;
    double gapTol = kDefaultGapTolerance;
    std::filesystem::path outCsv;
    unsigned threads = 0;  ///< 0: hardware concurrency
};

/// Pair i uses the per-pair key derive_seed(seed, i); psi and phi are drawn from
/// its two child streams. The key is what the CSV's seed column records.
inline io::ScanRecord scan_one(std::size_t dimB, std::uint64_t pairSeed, double tol, double gapTol) {
    const auto psi = haar_sample(dimB, derive_seed(pairSeed, 0));
    const auto phi = haar_sample(dimB, derive_seed(pairSeed, 1));
    const PairEvaluation e = evaluate_pair(psi, phi, tol, gapTol);
    return io::ScanRecord{pairSeed,
                          dimB,
                          e.framed.frame.lambda,
                          e.fidelities.fGlobal,
                          e.fidelities.fLocal,
                          e.fidelities.gap(),
                          e.verdictNumeric,
                          e.framed.report.verdict};
}

struct ScanSummary {
    std::size_t samples = 0;
    double minGap = 0.0;
    double maxGap = 0.0;
    std::size_t equalityHits = 0;
    std::size_t disagreements = 0;
    std::size_t inequalityViolations = 0;
};

/// Rows come back in index order regardless of how work was split.
inline std::vector<io::ScanRecord> scan_records(const ScanOptions& opt) {
    std::vector<io::ScanRecord> rows(opt.samples);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(opt.threads == 0 ? hw : opt.threads, std::max<std::size_t>(1, opt.samples)));
    std::vector<std::exception_ptr> failures(workers);
    auto work = [&](unsigned worker, std::size_t begin, std::size_t end) {
        try {
            for (std::size_t i = begin; i < end; ++i)
                rows[i] = scan_one(opt.dimB, derive_seed(opt.seed, i), opt.tol, opt.gapTol);
        } catch (...) {
            failures[worker] = std::current_exception();
        }
    };
    if (workers <= 1) {
        work(0, 0, opt.samples);
        if (failures[0]) std::rethrow_exception(failures[0]);
        return rows;
    }
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (opt.samples + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(opt.samples, begin + chunk);
            if (begin < end) pool.emplace_back(work, w, begin, end);
        }
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    return rows;
}

inline ScanSummary summarize(const std::vector<io::ScanRecord>& rows) {
    ScanSummary s;
    s.samples = rows.size();
    s.minGap = std::numeric_limits<double>::infinity();
    s.maxGap = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        s.minGap = std::min(s.minGap, r.gap);
        s.maxGap = std::max(s.maxGap, r.gap);
        if (r.verdictNumeric) ++s.equalityHits;
        if (r.verdictNumeric != r.verdictConditions) ++s.disagreements;
        if (r.gap < -kInequalitySlack) ++s.inequalityViolations;
    }
    return s;
}

inline int cmd_scan(const ScanOptions& opt, std::ostream& out, std::ostream& err) {
    if (opt.samples < 1) {
        err << "fideq scan: --samples must be at least 1\n";
        return kInputError;
    }
    if (opt.dimB < 2) {
        err << "fideq scan: --dim-b must be at least 2\n";
        return kInputError;
    }
    try {
        detail::require_tolerance(opt.tol);
        detail::require_tolerance(opt.gapTol);
        const std::vector<io::ScanRecord> rows = scan_records(opt);
        std::string csv = std::string(io::kScanCsvHeader) + '\n';
        for (const auto& r : rows) csv += io::scan_csv_row(r) + '\n';
        if (!opt.outCsv.empty()) io::write_file_atomically(opt.outCsv, csv);

        const ScanSummary s = summarize(rows);
        const io::Json summary{{"samples", s.samples},
                               {"dimB", opt.dimB},
                               {"seed", opt.seed},
                               {"minGap", s.minGap},
                               {"maxGap", s.maxGap},
                               {"equalityHits", s.equalityHits},
                               {"disagreements", s.disagreements},
                               {"inequalityViolations", s.inequalityViolations}};
        out << summary.dump(2) << '\n';
        if (opt.outCsv.empty()) out << csv;
        if (s.disagreements != 0 || s.inequalityViolations != 0) {
            err << "fideq scan: " << s.disagreements << " verdict disagreements, " << s.inequalityViolations
                << " inequality violations\n";
            return kInconsistent;
        }
        return kOk;
    } catch (const std::exception& ex) {
        err << "fideq scan: " << ex.what() << '\n';
        return kInputError;
    }
}

struct GenerateOptions {
    std::filesystem::path paramsFile;
    std::size_t dimB = 2;
    std::filesystem::path outFile;
    double tol = kDefaultConditionTolerance;
    double gapTol = kDefaultGapTolerance;
};

inline int cmd_generate(const GenerateOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        detail::require_tolerance(opt.tol);
        detail::require_tolerance(opt.gapTol);
        const io::Json params = io::read_json_file(opt.paramsFile);
        std::optional<BipartitePureState> psi, phi;
        bool product = false;
        if (params.is_object() && params.contains("c11")) {
            const SeparableFamilyParams sp = io::separable_params_from_json(params);
            psi = frame_state(canonical_frame(0.0, opt.dimB));
            phi = generate_separable_psi_family(sp, opt.dimB);
        } else {
            const EqualityFamilyParams ep = io::params_from_json(params);
            validate(ep);
            const SchmidtForm frame = canonical_frame(ep.lambda, opt.dimB);
            psi = frame_state(frame);
            product = ep.p == 1.0;
            phi = product ? generate_separable_product_state(ep, frame) : generate_equality_state(ep, frame);
        }

        const PairEvaluation e = evaluate_pair(*psi, *phi, opt.tol, opt.gapTol);
        const io::Json doc{{"psi", io::state_to_json(*psi)},
                           {"phi", io::state_to_json(*phi)},
                           {"product", product},
                           {"fGlobal", e.fidelities.fGlobal},
                           {"fLocal", e.fidelities.fLocal},
                           {"gap", e.fidelities.gap()},
                           {"verdictNumeric", e.verdictNumeric},
                           {"conditions", io::report_to_json(e.framed.report)}};
        const std::string text = doc.dump(2) + '\n';
        if (opt.outFile.empty())
            out << text;
        else
            io::write_file_atomically(opt.outFile, text);
        if (!e.framed.report.verdict || !e.verdictNumeric) {
            err << "fideq generate: generated state does not satisfy the equality conditions\n";
            return kInconsistent;
        }
        return kOk;
    } catch (const std::exception& ex) {
        err << "fideq generate: " << ex.what() << '\n';
        return kInputError;
    }
}

inline int cmd_selftest(const SelftestOptions& opt, std::ostream& out, std::ostream& err) {
    if (!(opt.tol > 0.0)) {
        err << "fideq selftest: --tol must be positive\n";
        return kInputError;
    }
    const auto suites = run_selftest(opt);
    io::Json arr = io::Json::array();
    bool ok = true;
    for (const auto& s : suites) {
        arr.push_back({{"name", s.name}, {"cases", s.cases}, {"maxError", s.maxError}, {"passed", s.passed}});
        ok = ok && s.passed;
    }
    out << io::Json{{"tol", opt.tol}, {"suites", arr}, {"passed", ok}}.dump(2) << '\n';
    return ok ? kOk : kInconsistent;
}

/// Parses argv and dispatches to a subcommand.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Global vs local fidelity of bipartite pure states (qubit x qudit)", "fideq"};
    app.require_subcommand(1);

    CheckOptions check;
    auto* checkCmd = app.add_subcommand("check", "Compare F^AB and F^A for a state pair and test the conditions");
    checkCmd->add_option("psi", check.psiFile, "State JSON for psi")->required();
    checkCmd->add_option("phi", check.phiFile, "State JSON for phi")->required();
    checkCmd->add_option("--tol", check.tol, "Condition residual tolerance")->capture_default_str();
    checkCmd->add_option("--gap-tol", check.gapTol, "Tolerance on |F^A - F^AB|")->capture_default_str();

    ScanOptions scan;
    auto* scanCmd = app.add_subcommand("scan", "Scan Haar-random pairs for the inequality and verdict agreement");
    scanCmd->add_option("--dim-b", scan.dimB, "Dimension of system B")->capture_default_str();
    scanCmd->add_option("--samples", scan.samples, "Number of pairs")->required();
    scanCmd->add_option("--seed", scan.seed, "Base seed")->capture_default_str();
    scanCmd->add_option("--tol", scan.tol, "Condition residual tolerance")->capture_default_str();
    scanCmd->add_option("--gap-tol", scan.gapTol, "Tolerance on |F^A - F^AB|")->capture_default_str();
    scanCmd->add_option("--out", scan.outCsv, "CSV output path (stdout if omitted)");
    scanCmd->add_option("--threads", scan.threads, "Worker threads (0 = all cores)")->capture_default_str();

    GenerateOptions gen;
    auto* genCmd = app.add_subcommand("generate", "Build a state achieving F^AB = F^A from family parameters");
    genCmd->add_option("params", gen.paramsFile, "Parameter JSON")->required();
    genCmd->add_option("--dim-b", gen.dimB, "Dimension of system B")->capture_default_str();
    genCmd->add_option("--out", gen.outFile, "Output JSON path (stdout if omitted)");
    genCmd->add_option("--tol", gen.tol, "Condition residual tolerance")->capture_default_str();
    genCmd->add_option("--gap-tol", gen.gapTol, "Tolerance on |F^A - F^AB|")->capture_default_str();

    SelftestOptions self;
    auto* selfCmd = app.add_subcommand("selftest", "Run the fixed-seed consistency suites");
    selfCmd->add_option("--tol", self.tol, "Pass threshold for every suite")->capture_default_str();
    selfCmd->add_option("--cases", self.casesPerSuite, "Cases per suite")->capture_default_str();
    selfCmd->add_flag("--inject-fault", self.injectFault, "Debug: corrupt the closed form to exercise the harness");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "fideq: " << e.what() << '\n';
        return kInputError;
    }

    if (checkCmd->parsed()) return cmd_check(check, out, err);
    if (scanCmd->parsed()) return cmd_scan(scan, out, err);
    if (genCmd->parsed()) return cmd_generate(gen, out, err);
    return cmd_selftest(self, out, err);
}

} // namespace fideq::cli
