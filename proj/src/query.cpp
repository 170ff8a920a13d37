#include <algorithm>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include "ldf/client.hpp"
#include "ldf/error.hpp"

namespace ldf::client {

std::vector<std::string> BgpQuery::variables() const {
    std::vector<std::string> vars;
    for (const auto& tp : patterns)
        for (auto& v : tp.variables())
            if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(std::move(v));
    return vars;
}

bool BgpQuery::connected() const {
    std::vector<std::vector<std::string>> groups;
    for (const auto& tp : patterns)
        if (!tp.is_ground()) groups.push_back(tp.variables());
    if (groups.size() <= 1) return true;
    std::vector<bool> reached(groups.size(), false);
    std::vector<std::string> frontier = groups[0];
    reached[0] = true;
    bool grew = true;
    while (grew) {
        grew = false;
        for (std::size_t i = 0; i < groups.size(); ++i) {
            if (reached[i]) continue;
            for (const auto& v : groups[i]) {
                if (std::find(frontier.begin(), frontier.end(), v) != frontier.end()) {
                    reached[i] = true;
                    frontier.insert(frontier.end(), groups[i].begin(), groups[i].end());
                    grew = true;
                    break;
                }
            }
        }
    }
    return std::all_of(reached.begin(), reached.end(), [](bool b) { return b; });
}

std::vector<BgpQuery> parse_queries(std::istream& in) {
    std::vector<BgpQuery> out;
    std::optional<BgpQuery> current;
    std::string line;
    std::size_t lineno = 0;
    auto close = [&] {
        if (!current) return;
        if (current->patterns.empty())
            throw ParseError("query '" + current->name + "' has no patterns", lineno);
        out.push_back(std::move(*current));
        current.reset();
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) {
            close();
            continue;
        }
        if (line[first] == '#') {
            std::string_view rest = std::string_view(line).substr(first + 1);
            while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
            if (rest.substr(0, 5) == "name:") {
                close();
                rest.remove_prefix(5);
                while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
                current = BgpQuery{std::string(rest), {}};
            }
            continue;
        }
        if (!current) current = BgpQuery{"Q" + std::to_string(out.size() + 1), {}};
        try {
            current->patterns.push_back(rdf::parse_pattern(std::string_view(line).substr(first)));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    close();
    return out;
}

std::vector<BgpQuery> load_queries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open query file '" + path + "'");
    return parse_queries(in);
}

void write_queries(std::ostream& out, const std::vector<BgpQuery>& queries) {
    for (std::size_t i = 0; i < queries.size(); ++i) {
        if (i) out << '\n';
        out << "# name: " << queries[i].name << '\n';
        for (const auto& tp : queries[i].patterns) out << tp.wire() << " .\n";
    }
}

std::string_view engine_name(Engine e) { return e == Engine::Tpf ? "tpf" : "brtpf"; }

Engine parse_engine(std::string_view name) {
    if (name == "tpf") return Engine::Tpf;
    if (name == "brtpf") return Engine::Brtpf;
    throw ConfigError("unknown engine '" + std::string(name) + "' (expected tpf or brtpf)");
}

}  // namespace ldf::client
