// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <atomic>
#include <chrono>
#include <random>
#include <thread>

#include "solomon/sandbox/sandbox.hpp"
#include "temp_dir.hpp"

using namespace solomon::sandbox;
namespace fs = std::filesystem;

TEST_CASE("code extraction") {
    SUBCASE("single tagged block") {
        const auto r = extract_code("Plan first.\n```python\nimport gdspy\nprint(1)\n```\nDone.");
        CHECK(r.source == "import gdspy\nprint(1)\n");
        CHECK(r.warnings.empty());
    }
    SUBCASE("no fence") { CHECK_THROWS_AS(extract_code("just prose, no code"), NoCodeBlock); }
    SUBCASE("two tagged blocks") {
        const auto r = extract_code("```python\na = 1\n```\ntext\n```python\nb = 2\n```\n");
        CHECK(r.source == "a = 1\n");
        REQUIRE(r.warnings.size() == 1);
        CHECK(r.warnings[0].rfind("MultipleBlocks", 0) == 0);
    }
    SUBCASE("untagged fallback") {
        const auto r = extract_code("```\nx = 3\n```");
        CHECK(r.source == "x = 3\n");
        CHECK(r.warnings.at(0).rfind("UntaggedBlock", 0) == 0);
    }
    SUBCASE("tagged block wins over an earlier untagged one") {
        const auto r = extract_code("```\nnotes\n```\n```py\ny = 4\n```\n");
        CHECK(r.source == "y = 4\n");
    }
    SUBCASE("other languages only") { CHECK_THROWS_AS(extract_code("```bash\nls\n```"), NoCodeBlock); }
    SUBCASE("unterminated fence") {
        const auto r = extract_code("```python\nz = 5\n");
        CHECK(r.source == "z = 5\n");
        CHECK(r.warnings.at(0).rfind("UnterminatedBlock", 0) == 0);
    }
}

TEST_CASE("sanitizer") {
    const std::string src = "import gdspy\nlib = gdspy.GdsLibrary()\ngdspy.LayoutViewer(lib)\nlib.write_gds('a.gds')\n";
    SUBCASE("viewer line removed") {
        const auto r = sanitize(src);
        CHECK(r.source == "import gdspy\nlib = gdspy.GdsLibrary()\nlib.write_gds('a.gds')\n");
        CHECK(r.removed_lines == std::vector<std::string>{"gdspy.LayoutViewer(lib)"});
    }
    SUBCASE("no matches is identity") {
        const std::string clean = "a = 1\nb = 2";
        const auto r = sanitize(clean);
        CHECK(r.source == clean);
        CHECK(r.removed_lines.empty());
    }
    SUBCASE("pattern matching every line") {
        const auto r = sanitize(src, {"g"});
        CHECK(r.source.empty());
        CHECK(r.removed_lines.size() == 4);
    }
    SUBCASE("soundness and idempotence on random sources") {
        std::mt19937 rng(5);
        const std::vector<std::string> pieces = {"x = 1", "gdspy.LayoutViewer()", "# LayoutViewer off", "print('hi')",
                                                 "", "  LayoutViewer", "Layout Viewer"};
        for (int i = 0; i < 200; ++i) {
            std::string s;
            const int n = static_cast<int>(rng() % 12);
            for (int k = 0; k < n; ++k) s += pieces[rng() % pieces.size()] + (rng() % 5 ? "\n" : "\r\n");
            const auto once = sanitize(s);
            CHECK(once.source.find("LayoutViewer") == std::string::npos);
            CHECK(sanitize(once.source).source == once.source);
            CHECK(sanitize(once.source).removed_lines.empty());
        }
    }
}

TEST_CASE("log tail cap") {
    std::string text;
    for (int i = 0; i < 1000; ++i) text += "line " + std::to_string(i) + "\n";
    text += "ValueError: decisive";
    bool truncated = false;
    const auto t = tail_bytes(text, 200, &truncated);
    CHECK(truncated);
    CHECK(t.size() <= 200);
    CHECK(t.rfind("[... truncated ", 0) == 0);
    CHECK(t.find("ValueError: decisive") != std::string::npos);
    // Every kept line is whole.
    const auto body = t.substr(t.find('\n') + 1);
    CHECK(body.rfind("line ", 0) == 0);
    CHECK(tail_bytes("short", 200, &truncated) == "short");
    CHECK_FALSE(truncated);
}

TEST_CASE("execution outcomes") {
    solomon::testing::TempDir root;
    ExecutionLimits limits;
    limits.timeout_seconds = 30;

    SUBCASE("one artifact") {
        const auto out = execute("open('out.gds', 'wb').write(b'\\x00\\x06\\x00\\x02\\x02\\x58')\n", limits,
                                 root.fresh("a"));
        CHECK(out.status == ExecStatus::ok);
        CHECK(out.exit_code == 0);
        REQUIRE(out.artifacts.size() == 1);
        CHECK(out.primary_artifact()->name == "out.gds");
        CHECK(out.primary_artifact()->payload.size() == 6);
    }
    SUBCASE("largest of several artifacts") {
        const auto out = execute(
            "import os\nos.makedirs('sub')\nopen('a.gds','wb').write(b'1')\nopen('sub/b.GDS','wb').write(b'22')\n",
            limits, root.fresh("b"));
        CHECK(out.status == ExecStatus::ok);
        CHECK(out.artifacts.size() == 2);
        CHECK(out.primary_artifact()->name == "sub/b.GDS");
        CHECK(out.warnings.at(0).rfind("AmbiguousArtifact", 0) == 0);
    }
    SUBCASE("no artifact") {
        const auto out = execute("print('hello')\n", limits, root.fresh("c"));
        CHECK(out.status == ExecStatus::no_artifact);
        CHECK(out.stdout_text == "hello\n");
    }
    SUBCASE("attribute error") {
        const auto out = execute("import json\njson.LayoutViewer()\n", limits, root.fresh("d"));
        CHECK(out.status == ExecStatus::nonzero_exit);
        CHECK(out.exit_code == 1);
        CHECK(out.stderr_text.find("AttributeError: module 'json' has no attribute 'LayoutViewer'") !=
              std::string::npos);
        CHECK(out.stderr_text.find("File \"source.py\", line 2") != std::string::npos);
    }
    SUBCASE("missing interpreter") {
        ExecutionLimits bad = limits;
        bad.interpreter = {"no-such-interpreter-xyz"};
        const auto out = execute("print(1)\n", bad, root.fresh("e"));
        CHECK(out.status == ExecStatus::spawn_failure);
    }
    SUBCASE("workdir layout") {
        const auto dir = root.fresh("f");
        execute("import sys\nprint('o')\nprint('e', file=sys.stderr)\n", limits, dir);
        CHECK(fs::exists(dir / "source.py"));
        CHECK(fs::exists(dir / "stdout.txt"));
        CHECK(fs::exists(dir / "stderr.txt"));
    }
    SUBCASE("nonempty workdir is refused") {
        const auto dir = root.fresh("g");
        execute("print(1)\n", limits, dir);
        CHECK(execute("print(1)\n", limits, dir).status == ExecStatus::spawn_failure);
    }
    SUBCASE("memory cap") {
        ExecutionLimits small = limits;
        small.memory_bytes = uint64_t{256} << 20;
        const auto out = execute("x = bytearray(1 << 30)\n", small, root.fresh("h"));
        CHECK(out.status == ExecStatus::nonzero_exit);
        CHECK(out.stderr_text.find("MemoryError") != std::string::npos);
    }
    SUBCASE("long output is capped at the tail") {
        ExecutionLimits capped = limits;
        capped.log_cap_bytes = 1024;
        const auto out = execute("for i in range(10000): print('row', i)\nraise SystemExit('final words')\n",
                                 capped, root.fresh("i"));
        CHECK(out.stdout_truncated);
        CHECK(out.stdout_text.size() <= 1024);
        CHECK(out.stdout_text.find("row 9999") != std::string::npos);
        CHECK(out.stderr_text == "final words\n");
    }
}

TEST_CASE("spin loop is killed at the timeout") {
    solomon::testing::TempDir root;
    ExecutionLimits limits;
    limits.timeout_seconds = 1.5;
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = execute("import subprocess, sys\n"
                             "subprocess.Popen([sys.executable, '-c', 'while True: pass'])\n"
                             "while True:\n    pass\n",
                             limits, root.fresh("spin"));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(out.status == ExecStatus::timeout);
    CHECK(out.duration_seconds >= 1.5 * 0.9);
    CHECK(out.duration_seconds <= 1.5 * 1.1);
    CHECK(wall <= 1.5 * 1.1 + 0.2);
}

TEST_CASE("concurrent executions stay isolated") {
    solomon::testing::TempDir root;
    WorkerPool pool(4);
    ExecutionLimits limits;
    std::atomic<int> failures{0};
    std::vector<std::thread> threads;
    for (int w = 0; w < 8; ++w) {
        threads.emplace_back([&, w] {
            for (int trial = 0; trial < 3; ++trial) {
                const std::string token = std::to_string(w) + "-" + std::to_string(trial);
                const auto dir = root.fresh("w" + token);
                const auto out = pool.execute("import os\nassert sorted(os.listdir('.')) == ['source.py', "
                                              "'stderr.txt', 'stdout.txt'], os.listdir('.')\n"
                                              "open('t.gds','w').write('" + token + "')\n",
                                              limits, dir);
                const bool good = out.status == ExecStatus::ok && out.artifacts.size() == 1 &&
                                  std::string(out.artifacts[0].payload.begin(), out.artifacts[0].payload.end()) == token;
                if (!good) ++failures;
            }
        });
    }
    for (auto& t : threads) t.join();
    CHECK(failures == 0);
}
