#include "cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "hvlab/analysis.hpp"
#include "hvlab/chsh.hpp"
#include "hvlab/engine.hpp"
#include "hvlab/errors.hpp"
#include "hvlab/model_io.hpp"
#include "hvlab/paper_model.hpp"

namespace hvlab::cli {

namespace {

using nlohmann::json;

constexpr const char* kReportSchema = "hvlab-report/1";

// One number serializer for both output formats, so CSV and JSON carry
// identical numerals.
std::string format_number(double x) { return json(x).dump(); }

Angle parse_plain(const std::string& text) {
    errno = 0;
    char* end = nullptr;
    double value = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
        throw DomainError("malformed angle \"" + text + "\"");
    }
    return Angle(value);
}

}  // namespace

Angle parse_angle(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) {
        throw DomainError("malformed angle \"\"");
    }
    std::size_t pi_pos = s.find("pi");
    if (pi_pos == std::string::npos) {
        return parse_plain(s);
    }

    double sign = 1.0;
    std::string head = s.substr(0, pi_pos);
    if (!head.empty() && (head[0] == '+' || head[0] == '-')) {
        if (head[0] == '-') sign = -1.0;
        head = head.substr(1);
    }
    auto parse_raw = [&](const std::string& part) {
        errno = 0;
        char* end = nullptr;
        double value = std::strtod(part.c_str(), &end);
        if (end == part.c_str() || *end != '\0' || errno == ERANGE) {
            throw DomainError("malformed angle \"" + text + "\"");
        }
        return value;
    };
    double numerator = head.empty() ? 1.0 : parse_raw(head);
    double denominator = 1.0;
    std::string tail = s.substr(pi_pos + 2);
    if (!tail.empty()) {
        if (tail[0] != '/') {
            throw DomainError("malformed angle \"" + text + "\"");
        }
        denominator = parse_raw(tail.substr(1));
        if (denominator == 0.0) {
            throw DomainError("malformed angle \"" + text + "\": zero denominator");
        }
    }
    return Angle(sign * (numerator / denominator) * std::numbers::pi);
}

namespace {

std::vector<Angle> parse_angle_list(const std::string& text) {
    std::vector<Angle> angles;
    std::stringstream stream(text);
    std::string part;
    while (std::getline(stream, part, ',')) {
        angles.push_back(parse_angle(part));
    }
    if (angles.empty()) {
        throw DomainError("malformed angle list \"" + text + "\"");
    }
    return angles;
}

// Model selector: the builtin continuous model, the quantum reference, or a
// model file.
struct Target {
    std::string selector;
    std::unique_ptr<HvModel> model;  // null for the singlet reference

    bool is_singlet() const { return model == nullptr; }

    const HvModel& hv(const std::string& subcommand) const {
        if (!model) {
            throw DomainError(subcommand + ": the singlet reference carries no hidden variables");
        }
        return *model;
    }

    ineq::JointFn joint_fn() const {
        if (!model) {
            return [](Angle a, Angle b) { return singlet_joint(a, b); };
        }
        const HvModel* m = model.get();
        return [m](Angle a, Angle b) { return engine::exact_joint(*m, a, b); };
    }
};

Target resolve_target(const std::string& selector) {
    if (selector == "singlet") {
        return {selector, nullptr};
    }
    return {selector, engine::resolve_model(selector)};
}

struct CommonOpts {
    std::string model = "paper";
    std::string format = "json";
    std::string output;  // empty = stdout
    std::string backend = "exact";
    std::uint64_t n_samples = 1'000'000;
    std::int64_t seed_flag = -1;  // <0: unset, fall back to HVLAB_SEED, then 1
    int workers = 0;

    std::uint64_t resolved_seed() const {
        if (seed_flag >= 0) {
            return static_cast<std::uint64_t>(seed_flag);
        }
        if (const char* env = std::getenv("HVLAB_SEED")) {
            errno = 0;
            char* end = nullptr;
            unsigned long long value = std::strtoull(env, &end, 10);
            if (end != env && *end == '\0' && errno != ERANGE) {
                return static_cast<std::uint64_t>(value);
            }
        }
        return 1;
    }

    int resolved_workers() const {
        return workers > 0 ? workers
                           : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_mc) {
    cmd->add_option("--model", opts.model, "builtin model name (paper, singlet) or file path");
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--output", opts.output, "output path (default: stdout)");
    if (with_mc) {
        cmd->add_option("--backend", opts.backend, "evaluation backend")
            ->check(CLI::IsMember({"exact", "mc"}));
        cmd->add_option("--n-samples", opts.n_samples, "Monte Carlo sample count");
        cmd->add_option("--seed", opts.seed_flag, "RNG seed (overrides HVLAB_SEED)");
        cmd->add_option("--workers", opts.workers, "worker threads (0 = hardware parallelism)");
    }
}

json witness_json(const analysis::DependenceWitness& w) {
    json j;
    j["side"] = w.side;
    j["outcome"] = w.outcome;
    j["local_setting"] = w.local_setting;
    j["remote_from"] = w.remote_from;
    j["remote_to"] = w.remote_to;
    if (w.u) j["u"] = *w.u;
    if (w.v) j["v"] = *w.v;
    if (w.w) j["w"] = *w.w;
    j["p_from"] = w.p_from;
    j["p_to"] = w.p_to;
    return j;
}

json report_json(const analysis::DependenceReport& report) {
    json j;
    j["quantity"] = report.quantity;
    j["conditioning"] = report.conditioning;
    j["level"] = report.level;
    j["max_deviation"] = report.max_deviation;
    j["witness"] = witness_json(report.witness);
    if (!report.note.empty()) {
        j["note"] = report.note;
    }
    return j;
}

// CSV: header row plus data rows; all numbers via format_number.
struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const {
        std::ostringstream out;
        for (std::size_t i = 0; i < header.size(); ++i) {
            out << (i ? "," : "") << header[i];
        }
        out << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out << (i ? "," : "") << row[i];
            }
            out << '\n';
        }
        return out.str();
    }
};

std::vector<std::string> witness_csv_cells(const analysis::DependenceWitness& w) {
    auto opt = [](const std::optional<double>& v) {
        return v ? format_number(*v) : std::string();
    };
    return {w.side,
            std::to_string(w.outcome),
            format_number(w.local_setting),
            format_number(w.remote_from),
            format_number(w.remote_to),
            opt(w.u),
            opt(w.v),
            opt(w.w),
            format_number(w.p_from),
            format_number(w.p_to)};
}

const std::vector<std::string> kWitnessHeader = {
    "side", "outcome", "local_setting", "remote_from", "remote_to",
    "u",    "v",       "w",             "p_from",      "p_to"};

int emit(const json& config, const json& result, const Csv& csv, const CommonOpts& opts,
         std::ostream& out, std::ostream& err) {
    std::string text;
    if (opts.format == "json") {
        json doc;
        doc["schema"] = kReportSchema;
        doc["config"] = config;
        doc["result"] = result;
        text = doc.dump(1) + "\n";
    } else {
        text = csv.str();
    }
    if (opts.output.empty()) {
        out << text;
        return 0;
    }
    std::ofstream file(opts.output, std::ios::binary);
    if (!file) {
        err << "hvlab: cannot open output file " << opts.output << "\n";
        return 2;
    }
    file << text;
    return 0;
}

json base_config(const std::string& subcommand, const CommonOpts& opts) {
    json config;
    config["subcommand"] = subcommand;
    config["model"] = opts.model;
    config["format"] = opts.format;
    return config;
}

json angles_to_json(const std::vector<Angle>& list) {
    json arr = json::array();
    for (Angle a : list) {
        arr.push_back(a.value());
    }
    return arr;
}

// --- joint ---------------------------------------------------------------

int run_joint(const CommonOpts& opts, const std::string& a_text, const std::string& b_text,
              std::ostream& out, std::ostream& err) {
    std::vector<Angle> a_list = parse_angle_list(a_text);
    std::vector<Angle> b_list = parse_angle_list(b_text);
    Target target = resolve_target(opts.model);
    bool mc = opts.backend == "mc";
    if (mc && target.is_singlet()) {
        throw DomainError("joint: the singlet reference has no sampling backend");
    }

    json config = base_config("joint", opts);
    config["a"] = angles_to_json(a_list);
    config["b"] = angles_to_json(b_list);
    config["backend"] = opts.backend;
    if (mc) {
        config["n_samples"] = opts.n_samples;
        config["seed"] = opts.resolved_seed();
        config["workers"] = opts.resolved_workers();
    }

    json cells = json::array();
    Csv csv;
    csv.header = {"a", "b", "p_pp", "p_pm", "p_mp", "p_mm"};
    if (mc) {
        for (const char* c : {"se_pp", "se_pm", "se_mp", "se_mm"}) {
            csv.header.push_back(c);
        }
        csv.header.push_back("n_samples");
    }
    for (Angle a : a_list) {
        for (Angle b : b_list) {
            json cell;
            cell["a"] = a.value();
            cell["b"] = b.value();
            std::vector<std::string> row = {format_number(a.value()), format_number(b.value())};
            JointTable table;
            if (mc) {
                engine::McOptions mc_opts{opts.n_samples, opts.resolved_seed(),
                                          opts.resolved_workers()};
                engine::JointEstimate estimate =
                    engine::mc_estimate_joint(target.hv("joint"), a, b, mc_opts);
                table = estimate.table;
                cell["std_err"] = estimate.std_err;
                cell["n_samples"] = estimate.n_samples;
                for (int x : {+1, -1}) {
                    for (int y : {+1, -1}) {
                        cell[std::string("p_") + (x == 1 ? "p" : "m") + (y == 1 ? "p" : "m")] =
                            table.p(x, y);
                        row.push_back(format_number(table.p(x, y)));
                    }
                }
                for (double se : estimate.std_err) {
                    row.push_back(format_number(se));
                }
                row.push_back(std::to_string(estimate.n_samples));
            } else {
                table = target.is_singlet() ? singlet_joint(a, b)
                                            : engine::exact_joint(target.hv("joint"), a, b);
                for (int x : {+1, -1}) {
                    for (int y : {+1, -1}) {
                        cell[std::string("p_") + (x == 1 ? "p" : "m") + (y == 1 ? "p" : "m")] =
                            table.p(x, y);
                        row.push_back(format_number(table.p(x, y)));
                    }
                }
            }
            cell["correlator"] = table.correlator();
            cells.push_back(std::move(cell));
            csv.rows.push_back(std::move(row));
        }
    }
    json result;
    result["cells"] = std::move(cells);
    return emit(config, result, csv, opts, out, err);
}

// --- marginal -------------------------------------------------------------

int run_marginal(const CommonOpts& opts, const std::string& given, const std::string& a_text,
                 const std::string& b_text, int grid, std::ostream& out, std::ostream& err) {
    Angle a = parse_angle(a_text);
    Angle b = parse_angle(b_text);
    Target target = resolve_target(opts.model);
    const HvModel& model = target.hv("marginal");

    std::vector<Angle> points;
    std::string variable = given == "uv" ? "v" : "u";
    if (const auto* discrete = dynamic_cast<const DiscreteModel*>(&model)) {
        points = given == "uv" ? discrete->support_v : discrete->support_u;
    } else {
        if (grid < 1) {
            throw DomainError("marginal: --grid must be >= 1");
        }
        points.reserve(static_cast<std::size_t>(grid));
        for (int k = 0; k < grid; ++k) {
            points.emplace_back(kTwoPi * static_cast<double>(k) / static_cast<double>(grid));
        }
    }

    json config = base_config("marginal", opts);
    config["given"] = given;
    config["a"] = a.value();
    config["b"] = b.value();
    config["grid"] = static_cast<int>(points.size());

    json rows = json::array();
    Csv csv;
    csv.header = {variable, "p_minus", "p_plus"};
    for (Angle point : points) {
        // At the uv level the shared-HV convention u = v keeps the
        // conditioning on the local joint's support.
        OutcomeDist dist = given == "uv"
                               ? analysis::marginal_y_given_abuv(model, a, b, point, point)
                               : analysis::marginal_y_given_abu(model, a, b, point);
        json row;
        row[variable] = point.value();
        row["p_minus"] = dist.p_minus();
        row["p_plus"] = dist.p_plus();
        rows.push_back(std::move(row));
        csv.rows.push_back({format_number(point.value()), format_number(dist.p_minus()),
                            format_number(dist.p_plus())});
    }
    json result;
    result["quantity"] = given == "uv" ? "P(Y | a, b, u=v, v)" : "P(Y | a, b, u)";
    result["rows"] = std::move(rows);
    return emit(config, result, csv, opts, out, err);
}

// --- signal ---------------------------------------------------------------

int run_signal(const CommonOpts& opts, const std::string& level, std::ostream& out,
               std::ostream& err) {
    Target target = resolve_target(opts.model);
    analysis::DependenceReport report;
    if (level == "observable") {
        report = target.is_singlet() ? analysis::check_observable_nonsignaling_singlet()
                                     : analysis::check_observable_nonsignaling(
                                           target.hv("signal"));
    } else if (level == "cr") {
        report = analysis::check_cr_locality(target.hv("signal"));
    } else {
        report = analysis::check_generalized_locality(target.hv("signal"));
    }

    json config = base_config("signal", opts);
    config["level"] = level;

    Csv csv;
    csv.header = {"level", "quantity", "max_deviation"};
    csv.header.insert(csv.header.end(), kWitnessHeader.begin(), kWitnessHeader.end());
    std::vector<std::string> row = {level, report.quantity, format_number(report.max_deviation)};
    auto witness_cells = witness_csv_cells(report.witness);
    row.insert(row.end(), witness_cells.begin(), witness_cells.end());
    csv.rows.push_back(std::move(row));

    return emit(config, report_json(report), csv, opts, out, err);
}

// --- decompose ------------------------------------------------------------

int run_decompose(const CommonOpts& opts, std::ostream& out, std::ostream& err) {
    Target target = resolve_target(opts.model);
    analysis::DecompositionReport report = analysis::cr_decompose(target.hv("decompose"));

    json config = base_config("decompose", opts);

    json result;
    json absorbed = json::array();
    for (const auto& step : report.absorbed) {
        json entry;
        entry["component"] = step.component;
        entry["report"] = report_json(step.report);
        absorbed.push_back(std::move(entry));
    }
    result["absorbed"] = std::move(absorbed);
    result["local_part"] = report.local_part;
    result["nonlocal_part"] = report.nonlocal_part;

    Csv csv;
    csv.header = {"step", "component", "max_deviation"};
    csv.header.insert(csv.header.end(), kWitnessHeader.begin(), kWitnessHeader.end());
    for (std::size_t i = 0; i < report.absorbed.size(); ++i) {
        std::vector<std::string> row = {
            std::to_string(i + 1), report.absorbed[i].component,
            format_number(report.absorbed[i].report.max_deviation)};
        auto witness_cells = witness_csv_cells(report.absorbed[i].report.witness);
        row.insert(row.end(), witness_cells.begin(), witness_cells.end());
        csv.rows.push_back(std::move(row));
    }
    auto join = [](const std::vector<std::string>& parts) {
        std::string s;
        for (const auto& p : parts) {
            s += (s.empty() ? "" : " ") + p;
        }
        return s;
    };
    csv.rows.push_back({"final", "local_part=" + join(report.local_part) +
                                     ";nonlocal_part=" + join(report.nonlocal_part),
                        ""});

    return emit(config, result, csv, opts, out, err);
}

// --- chsh -----------------------------------------------------------------

int run_chsh(const CommonOpts& opts, const std::string& a0, const std::string& a1,
             const std::string& b0, const std::string& b1, std::ostream& out, std::ostream& err) {
    ineq::ChshSpec spec{parse_angle(a0), parse_angle(a1), parse_angle(b0), parse_angle(b1)};
    Target target = resolve_target(opts.model);
    bool mc = opts.backend == "mc";
    if (mc && target.is_singlet()) {
        throw DomainError("chsh: the singlet reference has no sampling backend");
    }

    ineq::JointFn joint;
    if (mc) {
        engine::McOptions mc_opts{opts.n_samples, opts.resolved_seed(), opts.resolved_workers()};
        const HvModel* model = &target.hv("chsh");
        joint = [model, mc_opts](Angle a, Angle b) {
            return engine::mc_estimate_joint(*model, a, b, mc_opts).table;
        };
    } else {
        joint = target.joint_fn();
    }

    double e00 = ineq::correlator(joint, spec.a0, spec.b0);
    double e01 = ineq::correlator(joint, spec.a0, spec.b1);
    double e10 = ineq::correlator(joint, spec.a1, spec.b0);
    double e11 = ineq::correlator(joint, spec.a1, spec.b1);
    double s = e00 - e01 + e10 + e11;

    json config = base_config("chsh", opts);
    config["a0"] = spec.a0.value();
    config["a1"] = spec.a1.value();
    config["b0"] = spec.b0.value();
    config["b1"] = spec.b1.value();
    config["backend"] = opts.backend;
    if (mc) {
        config["n_samples"] = opts.n_samples;
        config["seed"] = opts.resolved_seed();
        config["workers"] = opts.resolved_workers();
    }

    json result;
    result["e00"] = e00;
    result["e01"] = e01;
    result["e10"] = e10;
    result["e11"] = e11;
    result["s"] = s;
    result["abs_s"] = std::abs(s);

    Csv csv;
    csv.header = {"e00", "e01", "e10", "e11", "s", "abs_s"};
    csv.rows.push_back({format_number(e00), format_number(e01), format_number(e10),
                        format_number(e11), format_number(s), format_number(std::abs(s))});
    return emit(config, result, csv, opts, out, err);
}

// --- verify-eq6 -----------------------------------------------------------

int run_verify(const CommonOpts& opts, int n_models, std::ostream& out, std::ostream& err) {
    std::uint64_t seed = opts.resolved_seed();
    analysis::VerifySummary summary = analysis::verify_cr_implies_nonsignaling(seed, n_models);

    json config = base_config("verify-eq6", opts);
    config.erase("model");  // generator-based; no model selector involved
    config["n_models"] = n_models;
    config["seed"] = seed;

    json result;
    result["n_models"] = summary.n_models;
    result["n_passed"] = summary.n_passed;
    result["worst_deviation"] = summary.worst_deviation;
    result["worst_index"] = summary.worst_index;
    result["all_pass"] = summary.all_pass;

    Csv csv;
    csv.header = {"n_models", "n_passed", "worst_deviation", "worst_index", "all_pass"};
    csv.rows.push_back({std::to_string(summary.n_models), std::to_string(summary.n_passed),
                        format_number(summary.worst_deviation),
                        std::to_string(summary.worst_index),
                        summary.all_pass ? "true" : "false"});
    return emit(config, result, csv, opts, out, err);
}

// --- validate ---------------------------------------------------------------

int run_validate(const CommonOpts& opts, const std::string& path, std::ostream& out,
                 std::ostream& err) {
    json config = base_config("validate", opts);
    config["model"] = path;
    try {
        DiscreteModel model = load_model(path);
        json result;
        result["valid"] = true;
        result["settings_a"] = model.n_a();
        result["settings_b"] = model.n_b();
        result["support_u"] = model.n_u();
        result["support_v"] = model.n_v();
        result["support_w"] = model.n_w();
        Csv csv;
        csv.header = {"valid", "settings_a", "settings_b", "support_u", "support_v",
                      "support_w"};
        csv.rows.push_back({"true", std::to_string(model.n_a()), std::to_string(model.n_b()),
                            std::to_string(model.n_u()), std::to_string(model.n_v()),
                            std::to_string(model.n_w())});
        return emit(config, result, csv, opts, out, err);
    } catch (const Error& e) {
        json result;
        result["valid"] = false;
        result["error"] = e.what();
        Csv csv;
        csv.header = {"valid", "error"};
        csv.rows.push_back({"false", e.what()});
        emit(config, result, csv, opts, out, err);
        err << "hvlab: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"hidden-variable models of bipartite correlations: simulation and analysis"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string a_text = "0", b_text = "0";
    std::string given = "uv";
    int grid = 360;
    std::string level = "observable";
    std::string a0, a1, b0, b1;
    int n_models = 100;
    std::string validate_path;

    CLI::App* joint = app.add_subcommand("joint", "joint outcome table for (a, b) or a grid");
    add_common(joint, opts, true);
    joint->add_option("--a", a_text, "Alice setting(s), comma separated")->required();
    joint->add_option("--b", b_text, "Bob setting(s), comma separated")->required();

    CLI::App* marginal =
        app.add_subcommand("marginal", "Y-outcome marginals conditioned on local HVs");
    add_common(marginal, opts, false);
    marginal->add_option("--given", given, "conditioning level: uv (over a v grid) or u")
        ->check(CLI::IsMember({"uv", "u"}));
    marginal->add_option("--a", a_text, "Alice setting")->required();
    marginal->add_option("--b", b_text, "Bob setting")->required();
    marginal->add_option("--grid", grid, "grid points for continuous models (default 360)");

    CLI::App* signal = app.add_subcommand("signal", "dependence checks at one conditioning level");
    add_common(signal, opts, false);
    signal->add_option("--level", level, "observable | cr | full")
        ->check(CLI::IsMember({"observable", "cr", "full"}));

    CLI::App* decompose =
        app.add_subcommand("decompose", "iterative local-part decomposition with absorption log");
    add_common(decompose, opts, false);

    CLI::App* chsh = app.add_subcommand("chsh", "CHSH value for four settings");
    add_common(chsh, opts, true);
    chsh->add_option("--a0", a0, "first Alice setting")->required();
    chsh->add_option("--a1", a1, "second Alice setting")->required();
    chsh->add_option("--b0", b0, "first Bob setting")->required();
    chsh->add_option("--b1", b1, "second Bob setting")->required();

    CLI::App* verify = app.add_subcommand(
        "verify-eq6", "generated conditional-nonsignaling models stay observably nonsignaling");
    add_common(verify, opts, true);
    verify->add_option("--n-models", n_models, "number of generated models");

    CLI::App* validate = app.add_subcommand("validate", "lint a model file");
    add_common(validate, opts, false);
    validate->add_option("path", validate_path, "model file path")->required();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "hvlab: " << e.what() << "\n";
        return 2;
    }

    try {
        if (joint->parsed()) {
            return run_joint(opts, a_text, b_text, out, err);
        }
        if (marginal->parsed()) {
            return run_marginal(opts, given, a_text, b_text, grid, out, err);
        }
        if (signal->parsed()) {
            return run_signal(opts, level, out, err);
        }
        if (decompose->parsed()) {
            return run_decompose(opts, out, err);
        }
        if (chsh->parsed()) {
            return run_chsh(opts, a0, a1, b0, b1, out, err);
        }
        if (verify->parsed()) {
            return run_verify(opts, n_models, out, err);
        }
        if (validate->parsed()) {
            return run_validate(opts, validate_path, out, err);
        }
        err << "hvlab: no subcommand\n";
        return 2;
    } catch (const Error& e) {
        err << "hvlab: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "hvlab: internal error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace hvlab::cli
