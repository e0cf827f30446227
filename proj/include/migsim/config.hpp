#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "migsim/errors.hpp"

namespace migsim {

/**
 * Flat key-value run configuration with [section] headers, # or ;
 * comments, and whitespace-insensitive "key = value" lines. Lookups
 * throw ValidationError naming the missing or malformed field.
 */
class ConfigFile {
public:
    static ConfigFile load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file " + path.string());
        return parse(in, path.string());
    }

    static ConfigFile parse(std::istream& in, const std::string& name = "<config>") {
        ConfigFile config;
        std::string line, section;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto comment = line.find_first_of("#;");
            if (comment != std::string::npos) line.erase(comment);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            if (trimmed.front() == '[') {
                if (trimmed.back() != ']')
                    throw ParseError(name + ":" + std::to_string(line_no) + ": unterminated section header");
                section = trim(trimmed.substr(1, trimmed.size() - 2));
                config.sections_[section];
                continue;
            }
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ParseError(name + ":" + std::to_string(line_no) + ": expected key = value");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw ParseError(name + ":" + std::to_string(line_no) + ": empty key");
            config.sections_[section][key] = value;
        }
        return config;
    }

    bool has(const std::string& section, const std::string& key) const {
        const auto sec = sections_.find(section);
        return sec != sections_.end() && sec->second.count(key) > 0;
    }

    std::string get_string(const std::string& section, const std::string& key) const {
        const auto sec = sections_.find(section);
        if (sec == sections_.end() || sec->second.count(key) == 0)
            throw ValidationError("missing config field [" + section + "] " + key);
        return sec->second.at(key);
    }

    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
        return has(section, key) ? get_string(section, key) : fallback;
    }

    double get_double(const std::string& section, const std::string& key) const {
        return to_double(section, key, get_string(section, key));
    }

    double get_double_or(const std::string& section, const std::string& key, double fallback) const {
        return has(section, key) ? get_double(section, key) : fallback;
    }

    int get_int(const std::string& section, const std::string& key) const {
        const double v = get_double(section, key);
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw ValidationError("config field [" + section + "] " + key + " must be an integer");
        return i;
    }

    int get_int_or(const std::string& section, const std::string& key, int fallback) const {
        return has(section, key) ? get_int(section, key) : fallback;
    }

    /// Whitespace- or comma-separated list of numbers.
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const {
        std::vector<double> out;
        for (const auto& token : split(get_string(section, key)))
            out.push_back(to_double(section, key, token));
        return out;
    }

    std::vector<std::string> get_strings(const std::string& section, const std::string& key) const {
        return split(get_string(section, key));
    }

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

private:
    static std::string trim(const std::string& s) {
        const auto begin = s.find_first_not_of(" \t\r");
        if (begin == std::string::npos) return "";
        const auto end = s.find_last_not_of(" \t\r");
        return s.substr(begin, end - begin + 1);
    }

    static std::vector<std::string> split(const std::string& s) {
        std::string spaced = s;
        for (char& c : spaced)
            if (c == ',') c = ' ';
        std::vector<std::string> out;
        std::string token;
        std::istringstream in(spaced);
        while (in >> token) out.push_back(token);
        return out;
    }

    static double to_double(const std::string& section, const std::string& key,
                            const std::string& value) {
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
            return v;
        } catch (const std::exception&) {
            throw ValidationError("config field [" + section + "] " + key +
                                  " is not a number: " + value);
        }
    }

    std::map<std::string, std::map<std::string, std::string>> sections_;
};

} // namespace migsim
