#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "swarmlab/core.hpp"

namespace swarmlab {

/// Plain-text `key = value` document. `#` starts a comment, blank lines are
/// ignored, keys are case-sensitive, and list values are comma-separated.
/// A key may appear only once.
class KeyValueDoc {
public:
    static KeyValueDoc parse(std::string_view text, const std::string& origin = "<input>") {
        KeyValueDoc doc;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t eol = std::min(text.find('\n', pos), text.size());
            std::string_view line = text.substr(pos, eol - pos);
            pos = eol + 1;
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) {
                if (eol == text.size()) break;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected `key = value`");
            }
            std::string key(trim(line.substr(0, eq)));
            std::string value(trim(line.substr(eq + 1)));
            if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
            if (doc.values_.count(key)) {
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key `" + key + "`");
            }
            doc.values_.emplace(key, value);
            doc.order_.push_back(key);
            if (eol == text.size()) break;
        }
        return doc;
    }

    static KeyValueDoc load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::vector<std::string>& keys() const { return order_; }

    const std::string& raw(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing key `" + key + "`");
        return it->second;
    }

    std::vector<std::string> list(const std::string& key) const {
        std::vector<std::string> out;
        const std::string& v = raw(key);
        std::size_t pos = 0;
        while (pos <= v.size()) {
            const std::size_t comma = std::min(v.find(',', pos), v.size());
            std::string item(trim(std::string_view(v).substr(pos, comma - pos)));
            if (item.empty()) throw ConfigError("empty list item in `" + key + "`");
            out.push_back(std::move(item));
            pos = comma + 1;
        }
        return out;
    }

    double real(const std::string& key) const { return to_real(raw(key), key); }
    std::int64_t integer(const std::string& key) const { return to_integer(raw(key), key); }
    std::uint64_t unsigned_integer(const std::string& key) const { return to_unsigned(raw(key), key); }

    std::vector<double> real_list(const std::string& key) const {
        std::vector<double> out;
        for (const auto& s : list(key)) out.push_back(to_real(s, key));
        return out;
    }

    std::vector<std::int64_t> integer_list(const std::string& key) const {
        std::vector<std::int64_t> out;
        for (const auto& s : list(key)) out.push_back(to_integer(s, key));
        return out;
    }

    static double to_real(const std::string& s, const std::string& key) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
            throw ConfigError("`" + key + "`: not a finite number: " + s);
        }
        return v;
    }

    static std::int64_t to_integer(const std::string& s, const std::string& key) {
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw ConfigError("`" + key + "`: not an integer: " + s);
        }
        return v;
    }

    static std::uint64_t to_unsigned(const std::string& s, const std::string& key) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw ConfigError("`" + key + "`: not an unsigned integer: " + s);
        }
        return v;
    }

private:
    static std::string_view trim(std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    }

    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

} // namespace swarmlab
