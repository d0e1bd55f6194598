#pragma once

// Flat structured config text: one `key = value` per line, with numbers,
// quoted strings, booleans, arrays `[v, v]`, and inline tables
// `{ k = v, k = v }` as values. `#` starts a comment. Key order is
// preserved so a parsed config serializes back to an equivalent file.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "error_law.hpp"

namespace htrl {

class ConfigValue {
  public:
    enum class Type { number, string, boolean, array, table };

    ConfigValue() : type_(Type::table) {}
    static ConfigValue number(double v) {
        ConfigValue c;
        c.type_ = Type::number;
        c.num_ = v;
        return c;
    }
    static ConfigValue str(std::string v) {
        ConfigValue c;
        c.type_ = Type::string;
        c.str_ = std::move(v);
        return c;
    }
    static ConfigValue boolean(bool v) {
        ConfigValue c;
        c.type_ = Type::boolean;
        c.bool_ = v;
        return c;
    }
    static ConfigValue array(std::vector<ConfigValue> items) {
        ConfigValue c;
        c.type_ = Type::array;
        c.items_ = std::move(items);
        return c;
    }

    Type type() const { return type_; }
    bool is_table() const { return type_ == Type::table; }

    double as_number(const std::string& key = "") const {
        require(Type::number, key);
        return num_;
    }
    std::uint64_t as_uint(const std::string& key = "") const {
        const double v = as_number(key);
        if (v < 0.0 || v != std::floor(v))
            throw std::invalid_argument("config key '" + key + "' must be a non-negative integer");
        return static_cast<std::uint64_t>(v);
    }
    const std::string& as_string(const std::string& key = "") const {
        require(Type::string, key);
        return str_;
    }
    bool as_bool(const std::string& key = "") const {
        require(Type::boolean, key);
        return bool_;
    }
    const std::vector<ConfigValue>& as_array(const std::string& key = "") const {
        require(Type::array, key);
        return items_;
    }

    // Table access. get() throws naming the missing/ill-typed key.
    bool has(const std::string& key) const { return find(key) != nullptr; }
    const ConfigValue& get(const std::string& key) const {
        const ConfigValue* v = find(key);
        if (!v) throw std::invalid_argument("config key '" + key + "' is missing");
        return *v;
    }
    const ConfigValue* find(const std::string& key) const {
        for (const auto& [k, v] : entries_)
            if (k == key) return v.get();
        return nullptr;
    }
    void set(const std::string& key, ConfigValue v) {
        for (auto& [k, val] : entries_)
            if (k == key) {
                *val = std::move(v);
                return;
            }
        entries_.emplace_back(key, std::make_unique<ConfigValue>(std::move(v)));
    }
    const std::vector<std::pair<std::string, std::unique_ptr<ConfigValue>>>& entries() const {
        require(Type::table, "");
        return entries_;
    }

    // Dotted-path override with a value literal; the path must already exist.
    void override_path(const std::string& dotted, const std::string& literal) {
        ConfigValue* cur = this;
        std::size_t pos = 0;
        std::string path_seen;
        for (;;) {
            const std::size_t dot = dotted.find('.', pos);
            const std::string key = dotted.substr(pos, dot - pos);
            path_seen += (path_seen.empty() ? "" : ".") + key;
            ConfigValue* next = nullptr;
            for (auto& [k, v] : cur->entries_)
                if (k == key) next = v.get();
            if (!next)
                throw std::invalid_argument("override references unknown key '" + path_seen +
                                            "'");
            if (dot == std::string::npos) {
                *next = parse_value_literal(literal);
                return;
            }
            if (!next->is_table())
                throw std::invalid_argument("override path '" + path_seen +
                                            "' is not a table");
            cur = next;
            pos = dot + 1;
        }
    }

    std::string serialize() const {
        std::string out;
        require(Type::table, "");
        for (const auto& [k, v] : entries_) out += k + " = " + v->serialize_value() + "\n";
        return out;
    }

    static ConfigValue parse(const std::string& text) {
        ConfigValue table;
        std::istringstream in(text);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string stripped = strip_comment(line);
            if (stripped.find_first_not_of(" \t\r") == std::string::npos) continue;
            const std::size_t eq = stripped.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": expected key = value");
            const std::string key = trim(stripped.substr(0, eq));
            if (key.empty())
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": empty key");
            std::size_t pos = 0;
            const std::string rhs = trim(stripped.substr(eq + 1));
            ConfigValue v = parse_value(rhs, pos, key);
            if (trim(rhs.substr(pos)) != "")
                throw std::invalid_argument("config key '" + key + "': trailing characters");
            table.set(key, std::move(v));
        }
        return table;
    }

    static ConfigValue parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    static ConfigValue parse_value_literal(const std::string& text) {
        std::size_t pos = 0;
        ConfigValue v = parse_value(trim(text), pos, "<override>");
        return v;
    }

    ConfigValue(const ConfigValue& other) { *this = other; }
    ConfigValue& operator=(const ConfigValue& other) {
        type_ = other.type_;
        num_ = other.num_;
        str_ = other.str_;
        bool_ = other.bool_;
        items_ = other.items_;
        entries_.clear();
        for (const auto& [k, v] : other.entries_)
            entries_.emplace_back(k, std::make_unique<ConfigValue>(*v));
        return *this;
    }
    ConfigValue(ConfigValue&&) = default;
    ConfigValue& operator=(ConfigValue&&) = default;

    bool operator==(const ConfigValue& other) const {
        if (type_ != other.type_) return false;
        switch (type_) {
            case Type::number: return num_ == other.num_;
            case Type::string: return str_ == other.str_;
            case Type::boolean: return bool_ == other.bool_;
            case Type::array:
                if (items_.size() != other.items_.size()) return false;
                for (std::size_t i = 0; i < items_.size(); ++i)
                    if (!(items_[i] == other.items_[i])) return false;
                return true;
            case Type::table:
                if (entries_.size() != other.entries_.size()) return false;
                for (std::size_t i = 0; i < entries_.size(); ++i)
                    if (entries_[i].first != other.entries_[i].first ||
                        !(*entries_[i].second == *other.entries_[i].second))
                        return false;
                return true;
        }
        return false;
    }

  private:
    void require(Type t, const std::string& key) const {
        if (type_ != t)
            throw std::invalid_argument("config key '" + key + "' has the wrong type");
    }

    static std::string trim(const std::string& s) {
        const std::size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        const std::size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    static std::string strip_comment(const std::string& line) {
        bool in_str = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_str = !in_str;
            if (line[i] == '#' && !in_str) return line.substr(0, i);
        }
        return line;
    }

    static void skip_ws(const std::string& s, std::size_t& pos) {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r')) ++pos;
    }

    static ConfigValue parse_value(const std::string& s, std::size_t& pos,
                                   const std::string& key) {
        skip_ws(s, pos);
        if (pos >= s.size())
            throw std::invalid_argument("config key '" + key + "': missing value");
        const char c = s[pos];
        if (c == '"') {
            ++pos;
            std::string out;
            while (pos < s.size() && s[pos] != '"') {
                if (s[pos] == '\\' && pos + 1 < s.size()) ++pos;
                out += s[pos++];
            }
            if (pos >= s.size())
                throw std::invalid_argument("config key '" + key + "': unterminated string");
            ++pos;
            return str(out);
        }
        if (c == '[') {
            ++pos;
            std::vector<ConfigValue> items;
            skip_ws(s, pos);
            if (pos < s.size() && s[pos] == ']') {
                ++pos;
                return array({});
            }
            for (;;) {
                items.push_back(parse_value(s, pos, key));
                skip_ws(s, pos);
                if (pos < s.size() && s[pos] == ',') {
                    ++pos;
                    continue;
                }
                if (pos < s.size() && s[pos] == ']') {
                    ++pos;
                    return array(std::move(items));
                }
                throw std::invalid_argument("config key '" + key + "': malformed array");
            }
        }
        if (c == '{') {
            ++pos;
            ConfigValue table;
            skip_ws(s, pos);
            if (pos < s.size() && s[pos] == '}') {
                ++pos;
                return table;
            }
            for (;;) {
                skip_ws(s, pos);
                std::string k;
                while (pos < s.size() &&
                       (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
                    k += s[pos++];
                if (k.empty())
                    throw std::invalid_argument("config key '" + key + "': malformed table");
                skip_ws(s, pos);
                if (pos >= s.size() || s[pos] != '=')
                    throw std::invalid_argument("config key '" + key + "': expected = in table");
                ++pos;
                table.set(k, parse_value(s, pos, key + "." + k));
                skip_ws(s, pos);
                if (pos < s.size() && s[pos] == ',') {
                    ++pos;
                    continue;
                }
                if (pos < s.size() && s[pos] == '}') {
                    ++pos;
                    return table;
                }
                throw std::invalid_argument("config key '" + key + "': malformed table");
            }
        }
        // bare word: boolean or number
        std::size_t end = pos;
        while (end < s.size() && s[end] != ',' && s[end] != ']' && s[end] != '}' &&
               s[end] != ' ' && s[end] != '\t' && s[end] != '\r')
            ++end;
        const std::string word = s.substr(pos, end - pos);
        pos = end;
        if (word == "true") return boolean(true);
        if (word == "false") return boolean(false);
        try {
            std::size_t used = 0;
            const double v = std::stod(word, &used);
            if (used != word.size()) throw std::invalid_argument("trailing");
            return number(v);
        } catch (const std::exception&) {
            throw std::invalid_argument("config key '" + key + "': cannot parse value '" +
                                        word + "'");
        }
    }

    std::string serialize_value() const {
        switch (type_) {
            case Type::number: {
                char buf[40];
                std::snprintf(buf, sizeof(buf), "%.17g", num_);
                return buf;
            }
            case Type::string: {
                std::string out = "\"";
                for (char c : str_) {
                    if (c == '"' || c == '\\') out += '\\';
                    out += c;
                }
                return out + "\"";
            }
            case Type::boolean: return bool_ ? "true" : "false";
            case Type::array: {
                std::string out = "[";
                for (std::size_t i = 0; i < items_.size(); ++i)
                    out += (i ? ", " : "") + items_[i].serialize_value();
                return out + "]";
            }
            case Type::table: {
                std::string out = "{ ";
                bool first = true;
                for (const auto& [k, v] : entries_) {
                    if (!first) out += ", ";
                    first = false;
                    out += k + " = " + v->serialize_value();
                }
                return out + " }";
            }
        }
        return "";
    }

    Type type_ = Type::table;
    double num_ = 0.0;
    std::string str_;
    bool bool_ = false;
    std::vector<ConfigValue> items_;
    std::vector<std::pair<std::string, std::unique_ptr<ConfigValue>>> entries_;
};

// Error laws as tagged config records, e.g.
//   noise = { kind = "pareto", tail_index = 4.5 }
//   noise = { kind = "gaussian", sigma = 1 }
//   noise = { kind = "student_t", dof = 5 }
//   noise = { kind = "scaled", scale = 3, base = { kind = "pareto", tail_index = 2 } }
inline ErrorLaw law_from_config(const ConfigValue& v, const std::string& key = "noise") {
    if (!v.is_table()) throw std::invalid_argument("config key '" + key + "' must be a table");
    const std::string& kind = v.get("kind").as_string(key + ".kind");
    if (kind == "pareto")
        return ErrorLaw::pareto_symmetric(v.get("tail_index").as_number(key + ".tail_index"));
    if (kind == "gaussian") return ErrorLaw::gaussian(v.get("sigma").as_number(key + ".sigma"));
    if (kind == "student_t")
        return ErrorLaw::student_t(v.get("dof").as_number(key + ".dof"));
    if (kind == "scaled")
        return ErrorLaw::scaled(law_from_config(v.get("base"), key + ".base"),
                                v.get("scale").as_number(key + ".scale"));
    throw std::invalid_argument("config key '" + key + ".kind': unknown law '" + kind + "'");
}

inline ConfigValue law_to_config(const ErrorLaw& law) {
    ConfigValue t;
    switch (law.kind()) {
        case LawKind::gaussian:
            t.set("kind", ConfigValue::str("gaussian"));
            t.set("sigma", ConfigValue::number(law.scale()));
            return t;
        case LawKind::pareto_symmetric:
            t.set("kind", ConfigValue::str("pareto"));
            t.set("tail_index", ConfigValue::number(law.param()));
            break;
        case LawKind::student_t:
            t.set("kind", ConfigValue::str("student_t"));
            t.set("dof", ConfigValue::number(law.param()));
            break;
    }
    if (law.scale() != 1.0) {
        ConfigValue wrapped;
        wrapped.set("kind", ConfigValue::str("scaled"));
        wrapped.set("scale", ConfigValue::number(law.scale()));
        wrapped.set("base", std::move(t));
        return wrapped;
    }
    return t;
}

}  // namespace htrl
