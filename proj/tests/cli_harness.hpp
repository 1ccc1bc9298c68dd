#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testutil {

inline std::string cli_path() { return LENREWARD_CLI_PATH; }

inline std::filesystem::path make_temp_dir(const std::string& tag) {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / ("lenreward_" + tag + "_XXXXXX")).string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed for " + tmpl);
    return std::filesystem::path(tmpl);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs the CLI with the given argument string inside `dir`, capturing stdout
/// and stderr. `stdin_file` (when set) is fed to standard input.
inline CliResult run_cli(const std::string& args, const std::filesystem::path& dir,
                         const std::string& stdin_file = "",
                         const std::string& env_prefix = "") {
    const auto out_file = dir / "__stdout";
    const auto err_file = dir / "__stderr";
    std::string cmd = "cd '" + dir.string() + "' && " + env_prefix + " '" + cli_path() + "' " +
                      args;
    if (!stdin_file.empty()) cmd += " < '" + stdin_file + "'";
    cmd += " > '" + out_file.string() + "' 2> '" + err_file.string() + "'";

    const int rc = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    result.out = read_file(out_file);
    result.err = read_file(err_file);
    return result;
}

}  // namespace testutil
