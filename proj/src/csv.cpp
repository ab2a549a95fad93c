#include "cgforge/csv.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <unordered_set>

#include "cgforge/discretize.hpp"
#include "cgforge/error.hpp"

namespace cgforge {

namespace {

// Splits RFC 4180 text into records. Blank trailing lines are ignored.
class RecordReader {
public:
    explicit RecordReader(std::string text) : text_(std::move(text)) {
        // UTF-8 byte order mark
        if (text_.rfind("\xEF\xBB\xBF", 0) == 0) pos_ = 3;
    }

    bool next(std::vector<std::string>& fields) {
        fields.clear();
        skip_trailing_blank();
        if (pos_ >= text_.size()) return false;
        ++line_;
        std::string field;
        while (true) {
            if (pos_ < text_.size() && text_[pos_] == '"') {
                ++pos_;
                const std::size_t start_line = line_;
                while (true) {
                    if (pos_ >= text_.size()) {
                        throw ParseError("unterminated quoted field starting on line " +
                                         std::to_string(start_line));
                    }
                    char c = text_[pos_++];
                    if (c == '"') {
                        if (pos_ < text_.size() && text_[pos_] == '"') {
                            field.push_back('"');
                            ++pos_;
                        } else {
                            break;
                        }
                    } else {
                        if (c == '\n') ++line_;
                        field.push_back(c);
                    }
                }
                if (pos_ < text_.size() && !is_delim(text_[pos_])) {
                    throw ParseError("unexpected character after closing quote on line " +
                                     std::to_string(line_));
                }
            } else {
                while (pos_ < text_.size() && !is_delim(text_[pos_])) {
                    if (text_[pos_] == '"') {
                        throw ParseError("stray quote inside unquoted field on line " +
                                         std::to_string(line_));
                    }
                    field.push_back(text_[pos_++]);
                }
            }
            fields.push_back(std::move(field));
            field.clear();
            if (pos_ >= text_.size()) return true;
            char c = text_[pos_++];
            if (c == ',') continue;
            if (c == '\r' && pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
            return true;
        }
    }

private:
    static bool is_delim(char c) { return c == ',' || c == '\n' || c == '\r'; }

    void skip_trailing_blank() {
        std::size_t p = pos_;
        while (p < text_.size() && (text_[p] == '\n' || text_[p] == '\r')) ++p;
        if (p >= text_.size()) pos_ = p;
    }

    std::string text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

Variable infer_variable(const std::string& name, const std::vector<std::string>& cells) {
    std::vector<std::string> states(cells.begin(), cells.end());
    std::sort(states.begin(), states.end());
    states.erase(std::unique(states.begin(), states.end()), states.end());
    return Variable{name, std::move(states), 1};
}

std::vector<State> encode_with(const Variable& v, const std::vector<std::string>& cells) {
    std::map<std::string_view, State> lookup;
    for (std::size_t i = 0; i < v.states.size(); ++i) lookup.emplace(v.states[i], static_cast<State>(i));
    std::vector<State> codes;
    codes.reserve(cells.size());
    for (const auto& c : cells) {
        auto it = lookup.find(c);
        if (it == lookup.end()) {
            throw EncodingError("value '" + c + "' is not a state of variable '" + v.name + "'");
        }
        codes.push_back(it->second);
    }
    return codes;
}

}  // namespace

std::optional<std::size_t> RawTable::index_of(std::string_view name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
}

RawTable read_csv(std::istream& in) {
    std::string text(std::istreambuf_iterator<char>(in), {});
    RecordReader reader(std::move(text));

    RawTable t;
    std::vector<std::string> fields;
    if (!reader.next(fields)) throw ParseError("missing header record");
    std::unordered_set<std::string> seen;
    for (const auto& f : fields) {
        if (f.empty()) throw ParseError("empty column name in header");
        if (!seen.insert(f).second) throw ParseError("duplicate column name '" + f + "' in header");
    }
    t.names = fields;
    t.columns.resize(t.names.size());

    std::size_t row = 0;
    while (reader.next(fields)) {
        ++row;
        if (fields.size() != t.names.size()) {
            throw ParseError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                             " fields, header has " + std::to_string(t.names.size()));
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (fields[i].empty()) {
                throw ParseError("missing value in column '" + t.names[i] + "' at row " +
                                 std::to_string(row));
            }
            t.columns[i].push_back(std::move(fields[i]));
        }
    }
    t.row_count = row;
    return t;
}

RawTable drop_columns(const RawTable& t, const std::set<std::string>& names) {
    std::string unknown;
    for (const auto& n : names) {
        if (!t.index_of(n)) unknown += (unknown.empty() ? "" : ", ") + n;
    }
    if (!unknown.empty()) throw ValidationError("unknown column(s) to drop: " + unknown);

    RawTable out;
    out.row_count = t.row_count;
    for (std::size_t i = 0; i < t.names.size(); ++i) {
        if (names.contains(t.names[i])) continue;
        out.names.push_back(t.names[i]);
        out.columns.push_back(t.columns[i]);
    }
    return out;
}

Dataset encode(const RawTable& t, std::span<const DiscretizationRule> rules,
               std::optional<std::span<const Variable>> schema) {
    std::map<std::string, const DiscretizationRule*> by_column;
    for (const auto& r : rules) {
        if (!t.index_of(r.variable)) {
            throw ValidationError("discretization rule references unknown column '" + r.variable + "'");
        }
        if (!by_column.emplace(r.variable, &r).second) {
            throw ValidationError("more than one discretization rule for column '" + r.variable + "'");
        }
    }

    std::vector<Variable> vars;
    std::vector<std::vector<State>> cols;
    for (std::size_t i = 0; i < t.names.size(); ++i) {
        const auto& name = t.names[i];
        if (auto it = by_column.find(name); it != by_column.end()) {
            auto enc = discretize(t.columns[i], *it->second);
            vars.push_back(std::move(enc.variable));
            cols.push_back(std::move(enc.codes));
            continue;
        }
        if (schema) {
            auto it = std::find_if(schema->begin(), schema->end(),
                                   [&](const Variable& v) { return v.name == name; });
            if (it == schema->end()) {
                throw EncodingError("column '" + name + "' is not declared in the schema");
            }
            cols.push_back(encode_with(*it, t.columns[i]));
            vars.push_back(*it);
        } else {
            vars.push_back(infer_variable(name, t.columns[i]));
            cols.push_back(encode_with(vars.back(), t.columns[i]));
        }
    }
    return Dataset(std::move(vars), std::move(cols), t.row_count);
}

Dataset load_csv(std::istream& in, std::optional<std::span<const Variable>> schema) {
    return encode(read_csv(in), {}, schema);
}

}  // namespace cgforge
