// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>

#include "solomon/sandbox/sandbox.hpp"

namespace solomon::sandbox {

namespace {

struct Block {
    std::string info;
    std::string body;
    bool closed = false;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<Block> fenced_blocks(const std::string& text) {
    std::vector<Block> blocks;
    Block* open = nullptr;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        const bool last = end == std::string::npos;
        if (last) end = text.size();
        const std::string line = text.substr(pos, end - pos);
        const std::string t = trim(line);
        if (t.rfind("```", 0) == 0) {
            if (open) {
                if (t.find_first_not_of('`') == std::string::npos) {
                    open->closed = true;
                    open = nullptr;
                } else {
                    open->body += line + "\n";
                }
            } else {
                blocks.push_back({trim(t.substr(t.find_first_not_of('`') == std::string::npos
                                                    ? t.size()
                                                    : t.find_first_not_of('`'))),
                                  {}, false});
                open = &blocks.back();
            }
        } else if (open) {
            open->body += line + (last ? "" : "\n");
        }
        if (last) break;
        pos = end + 1;
    }
    return blocks;
}

bool is_python(const std::string& info) {
    const std::string tag = lower(info.substr(0, info.find_first_of(" \t{")));
    return tag == "python" || tag == "python3" || tag == "py";
}

}  // namespace

ExtractedCode extract_code(const std::string& response) {
    const auto blocks = fenced_blocks(response);
    const Block* chosen = nullptr;
    ExtractedCode out;
    for (const auto& b : blocks)
        if (is_python(b.info)) {
            chosen = &b;
            break;
        }
    if (!chosen) {
        for (const auto& b : blocks)
            if (b.info.empty()) {
                chosen = &b;
                out.warnings.push_back("UntaggedBlock: using an untagged fenced block");
                break;
            }
    }
    if (!chosen) throw NoCodeBlock();
    if (blocks.size() > 1)
        out.warnings.push_back("MultipleBlocks: " + std::to_string(blocks.size()) + " fenced blocks, using the first");
    if (!chosen->closed) out.warnings.push_back("UnterminatedBlock: code fence never closed");
    out.source = chosen->body;
    return out;
}

const std::vector<std::string>& default_blocklist() {
    static const std::vector<std::string> list = {"LayoutViewer"};
    return list;
}

SanitizeResult sanitize(const std::string& source, const std::vector<std::string>& blocklist) {
    SanitizeResult out;
    std::size_t pos = 0;
    while (pos < source.size()) {
        std::size_t end = source.find('\n', pos);
        end = (end == std::string::npos) ? source.size() : end + 1;
        const std::string_view line(source.data() + pos, end - pos);
        const bool blocked = std::any_of(blocklist.begin(), blocklist.end(), [&](const std::string& pattern) {
            return !pattern.empty() && line.find(pattern) != std::string_view::npos;
        });
        if (blocked) {
            std::string removed(line);
            while (!removed.empty() && (removed.back() == '\n' || removed.back() == '\r')) removed.pop_back();
            out.removed_lines.push_back(std::move(removed));
        } else {
            out.source.append(line);
        }
        pos = end;
    }
    return out;
}

}  // namespace solomon::sandbox
