#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace readctl::bench {

inline const std::string& passage() {
    static const std::string text = [] {
        std::ifstream in(READCTL_BENCH_PASSAGE);
        if (!in) throw std::runtime_error("cannot open " READCTL_BENCH_PASSAGE);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }();
    return text;
}

// the passage repeated as paragraphs, `copies` times
inline std::string repeated(std::size_t copies) {
    std::string out;
    for (std::size_t i = 0; i < copies; ++i) {
        if (i) out += "\n\n";
        out += passage();
    }
    return out;
}

}  // namespace readctl::bench
