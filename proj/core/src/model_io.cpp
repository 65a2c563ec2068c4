#include "hvlab/model_io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "hvlab/errors.hpp"

namespace hvlab {

namespace {

using nlohmann::json;

double parse_number(const json& node, const std::string& where) {
    if (node.is_number()) {
        return node.get<double>();
    }
    if (node.is_string()) {
        const std::string& text = node.get_ref<const std::string&>();
        errno = 0;
        char* end = nullptr;
        double value = std::strtod(text.c_str(), &end);
        if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
            throw ParseError(where + ": cannot parse number \"" + text + "\"");
        }
        return value;
    }
    throw ParseError(where + ": expected a decimal string or number");
}

std::vector<Angle> parse_angles(const json& node, const std::string& where) {
    if (!node.is_array() || node.empty()) {
        throw ParseError(where + ": expected a non-empty array");
    }
    std::vector<Angle> values;
    values.reserve(node.size());
    for (std::size_t i = 0; i < node.size(); ++i) {
        values.emplace_back(parse_number(node[i], where + "[" + std::to_string(i) + "]"));
    }
    return values;
}

const json& require(const json& doc, const char* key, const std::string& origin) {
    auto it = doc.find(key);
    if (it == doc.end()) {
        throw ParseError(origin + ": missing key \"" + std::string(key) + "\"");
    }
    return *it;
}

std::string kind_of(const json& node, const std::string& where) {
    if (!node.is_object()) {
        throw ParseError(where + ": expected an object with a \"kind\" field");
    }
    auto it = node.find("kind");
    if (it == node.end() || !it->is_string()) {
        throw ParseError(where + ": missing string \"kind\" field");
    }
    return it->get<std::string>();
}

void parse_uv(const json& node, DiscreteModel& model, const std::string& origin) {
    std::string where = origin + ": p_uv";
    std::string kind = kind_of(node, where);
    if (kind == "equal_diagonal") {
        if (model.support_u.size() != model.support_v.size()) {
            throw ValidationError("p_uv: equal_diagonal requires |support_u| == |support_v|");
        }
        int n = static_cast<int>(model.support_u.size());
        double mass = 1.0 / static_cast<double>(n);
        for (int k = 0; k < n; ++k) {
            model.p_uv.push_back({k, k, mass});
        }
        return;
    }
    if (kind != "table") {
        throw ParseError(where + ": unknown kind \"" + kind + "\"");
    }
    const json& rows = require(node, "rows", where);
    if (!rows.is_array() || rows.size() != model.support_u.size()) {
        throw ParseError(where + ": expected one row per support_u point");
    }
    for (std::size_t iu = 0; iu < rows.size(); ++iu) {
        const json& row = rows[iu];
        if (!row.is_array() || row.size() != model.support_v.size()) {
            throw ParseError(where + ": row " + std::to_string(iu) +
                             " must have one entry per support_v point");
        }
        for (std::size_t iv = 0; iv < row.size(); ++iv) {
            double p = parse_number(row[iv], where + " entry (" + std::to_string(iu) + ", " +
                                                 std::to_string(iv) + ")");
            if (p != 0.0) {
                model.p_uv.push_back({static_cast<int>(iu), static_cast<int>(iv), p});
            }
        }
    }
}

void parse_kernel(const json& node, DiscreteModel& model, const std::string& origin) {
    std::string where = origin + ": p_w_given_abuv";
    std::string kind = kind_of(node, where);
    if (kind == "delta_at_a") {
        model.p_w = DiscreteModel::DeltaAtA{};
        return;
    }
    if (kind != "table") {
        throw ParseError(where + ": unknown kind \"" + kind + "\"");
    }
    const json& rows = require(node, "rows", where);
    auto expect_array = [&](const json& n, std::size_t size, const std::string& level) {
        if (!n.is_array() || n.size() != size) {
            throw ParseError(where + ": expected " + std::to_string(size) + " entries at " +
                             level);
        }
    };
    expect_array(rows, model.settings_a.size(), "settings_a level");
    DiscreteModel::SparseKernel kernel;
    kernel.rows.reserve(model.settings_a.size() * model.settings_b.size() *
                        model.support_u.size() * model.support_v.size());
    for (std::size_t ia = 0; ia < rows.size(); ++ia) {
        expect_array(rows[ia], model.settings_b.size(), "settings_b level");
        for (std::size_t ib = 0; ib < rows[ia].size(); ++ib) {
            expect_array(rows[ia][ib], model.support_u.size(), "support_u level");
            for (std::size_t iu = 0; iu < rows[ia][ib].size(); ++iu) {
                expect_array(rows[ia][ib][iu], model.support_v.size(), "support_v level");
                for (std::size_t iv = 0; iv < rows[ia][ib][iu].size(); ++iv) {
                    const json& row = rows[ia][ib][iu][iv];
                    expect_array(row, model.support_w.size(), "support_w level");
                    std::vector<std::pair<int, double>> sparse;
                    for (std::size_t iw = 0; iw < row.size(); ++iw) {
                        double p = parse_number(row[iw], where + " row entry");
                        if (p != 0.0) {
                            sparse.emplace_back(static_cast<int>(iw), p);
                        }
                    }
                    kernel.rows.push_back(std::move(sparse));
                }
            }
        }
    }
    model.p_w = std::move(kernel);
}

std::vector<double> parse_response(const json& node, std::size_t n_settings,
                                   std::size_t n_local, std::size_t n_w,
                                   const std::string& where) {
    const json& rows = require(node, "rows", where);
    if (!rows.is_array() || rows.size() != n_settings) {
        throw ParseError(where + ": expected one row per setting");
    }
    std::vector<double> table;
    table.reserve(n_settings * n_local * n_w);
    for (std::size_t i = 0; i < n_settings; ++i) {
        const json& by_local = rows[i];
        if (!by_local.is_array() || by_local.size() != n_local) {
            throw ParseError(where + ": row " + std::to_string(i) +
                             " must have one entry per local support point");
        }
        for (std::size_t j = 0; j < n_local; ++j) {
            const json& by_w = by_local[j];
            if (!by_w.is_array() || by_w.size() != n_w) {
                throw ParseError(where + ": entry (" + std::to_string(i) + ", " +
                                 std::to_string(j) + ") must have one value per support_w point");
            }
            for (std::size_t k = 0; k < n_w; ++k) {
                table.push_back(parse_number(by_w[k], where + " value"));
            }
        }
    }
    return table;
}

std::string format_double(double x) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), x);
    return std::string(buffer, ptr);
}

json angles_json(const std::vector<Angle>& values) {
    json arr = json::array();
    for (Angle v : values) {
        arr.push_back(format_double(v.value()));
    }
    return arr;
}

}  // namespace

DiscreteModel parse_model(const std::string& json_text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": JSON parse error: " + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError(origin + ": top level must be an object");
    }

    DiscreteModel model;
    model.settings_a = parse_angles(require(doc, "settings_a", origin), origin + ": settings_a");
    model.settings_b = parse_angles(require(doc, "settings_b", origin), origin + ": settings_b");
    model.support_u = parse_angles(require(doc, "support_u", origin), origin + ": support_u");
    model.support_v = parse_angles(require(doc, "support_v", origin), origin + ": support_v");
    model.support_w = parse_angles(require(doc, "support_w", origin), origin + ": support_w");
    parse_uv(require(doc, "p_uv", origin), model, origin);
    parse_kernel(require(doc, "p_w_given_abuv", origin), model, origin);
    model.p_x = parse_response(require(doc, "p_x_given_auw", origin), model.settings_a.size(),
                               model.support_u.size(), model.support_w.size(),
                               origin + ": p_x_given_auw");
    model.p_y = parse_response(require(doc, "p_y_given_bvw", origin), model.settings_b.size(),
                               model.support_v.size(), model.support_w.size(),
                               origin + ": p_y_given_bvw");
    model.finalize();
    return model;
}

DiscreteModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path + ": cannot open file");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_model(buffer.str(), path);
}

std::string serialize_model(const DiscreteModel& model) {
    json doc;
    doc["schema"] = "hvlab-model/1";
    doc["settings_a"] = angles_json(model.settings_a);
    doc["settings_b"] = angles_json(model.settings_b);
    doc["support_u"] = angles_json(model.support_u);
    doc["support_v"] = angles_json(model.support_v);
    doc["support_w"] = angles_json(model.support_w);

    // Diagonal-uniform local joint collapses to its structured form.
    bool equal_diagonal = model.support_u.size() == model.support_v.size() &&
                          model.p_uv.size() == model.support_u.size();
    if (equal_diagonal) {
        double mass = 1.0 / static_cast<double>(model.n_u());
        for (const auto& entry : model.p_uv) {
            if (entry.iu != entry.iv || entry.p != mass) {
                equal_diagonal = false;
                break;
            }
        }
        for (int k = 0; equal_diagonal && k < model.n_u(); ++k) {
            if (model.support_u[static_cast<std::size_t>(k)] !=
                model.support_v[static_cast<std::size_t>(k)]) {
                equal_diagonal = false;
            }
        }
    }
    if (equal_diagonal) {
        doc["p_uv"] = {{"kind", "equal_diagonal"}};
    } else {
        json rows = json::array();
        std::vector<std::vector<double>> dense(
            static_cast<std::size_t>(model.n_u()),
            std::vector<double>(static_cast<std::size_t>(model.n_v()), 0.0));
        for (const auto& entry : model.p_uv) {
            dense[static_cast<std::size_t>(entry.iu)][static_cast<std::size_t>(entry.iv)] =
                entry.p;
        }
        for (const auto& dense_row : dense) {
            json row = json::array();
            for (double p : dense_row) {
                row.push_back(format_double(p));
            }
            rows.push_back(std::move(row));
        }
        doc["p_uv"] = {{"kind", "table"}, {"rows", std::move(rows)}};
    }

    if (model.has_delta_w()) {
        doc["p_w_given_abuv"] = {{"kind", "delta_at_a"}};
    } else {
        json by_a = json::array();
        for (int ia = 0; ia < model.n_a(); ++ia) {
            json by_b = json::array();
            for (int ib = 0; ib < model.n_b(); ++ib) {
                json by_u = json::array();
                for (int iu = 0; iu < model.n_u(); ++iu) {
                    json by_v = json::array();
                    for (int iv = 0; iv < model.n_v(); ++iv) {
                        std::vector<double> dense(static_cast<std::size_t>(model.n_w()), 0.0);
                        for (const auto& [iw, p] : model.w_row(ia, ib, iu, iv)) {
                            dense[static_cast<std::size_t>(iw)] = p;
                        }
                        json row = json::array();
                        for (double p : dense) {
                            row.push_back(format_double(p));
                        }
                        by_v.push_back(std::move(row));
                    }
                    by_u.push_back(std::move(by_v));
                }
                by_b.push_back(std::move(by_u));
            }
            by_a.push_back(std::move(by_b));
        }
        doc["p_w_given_abuv"] = {{"kind", "table"}, {"rows", std::move(by_a)}};
    }

    auto response_json = [&](int n_settings, int n_local, auto&& value) {
        json rows = json::array();
        for (int i = 0; i < n_settings; ++i) {
            json by_local = json::array();
            for (int j = 0; j < n_local; ++j) {
                json by_w = json::array();
                for (int k = 0; k < model.n_w(); ++k) {
                    by_w.push_back(format_double(value(i, j, k)));
                }
                by_local.push_back(std::move(by_w));
            }
            rows.push_back(std::move(by_local));
        }
        return json{{"rows", std::move(rows)}};
    };
    doc["p_x_given_auw"] = response_json(model.n_a(), model.n_u(), [&](int i, int j, int k) {
        return model.px(i, j, k);
    });
    doc["p_y_given_bvw"] = response_json(model.n_b(), model.n_v(), [&](int i, int j, int k) {
        return model.py(i, j, k);
    });

    return doc.dump(1);
}

void save_model(const DiscreteModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ParseError(path + ": cannot open file for writing");
    }
    out << serialize_model(model) << '\n';
}

}  // namespace hvlab
