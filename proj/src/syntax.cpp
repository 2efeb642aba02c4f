#include "pyfix/syntax.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <mutex>
#include <semaphore>
#include <vector>

#include "py_ast.hpp"
#include "py_parser.hpp"
#include "pyfix/errors.hpp"

namespace pyfix {
namespace {

std::string to_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string format_message(const std::string& py_class, const std::string& msg, int line) {
  std::string out = py_class + ": " + msg;
  if (line > 0) out += " (line " + std::to_string(line) + ")";
  return out;
}

SyntaxCheckResult failure_result(const std::string& py_class, const std::string& msg,
                                 int line) {
  SyntaxCheckResult r;
  r.ok = false;
  r.error_type = normalize_error_type(py_class, msg);
  if (line > 0) r.line = line;
  r.message = format_message(py_class, msg, line);
  return r;
}

SyntaxCheckResult embedded_check(const SourceProgram& p) {
  parse::ParseOutcome out = parse::parse_module(p.text, p.version);
  if (!out.error) {
    SyntaxCheckResult r;
    r.ok = true;
    return r;
  }
  return failure_result(out.error->py_class, out.error->message, out.error->line);
}

// Verdict script understood by both Python 2 and Python 3. Prints either
// "OK" or "ERR\t<class>\t<line>\t<message>".
const char* kCheckerScript =
    "import sys\n"
    "src = sys.stdin.read()\n"
    "try:\n"
    "    compile(src, '<input>', 'exec')\n"
    "    sys.stdout.write('OK')\n"
    "except SyntaxError as e:\n"
    "    m = (e.msg or '').replace('\\t', ' ').replace('\\n', ' ')\n"
    "    sys.stdout.write('ERR\\t%s\\t%d\\t%s' % (e.__class__.__name__, e.lineno or 0, m))\n"
    "except Exception as e:\n"
    "    m = str(e).replace('\\t', ' ').replace('\\n', ' ')\n"
    "    sys.stdout.write('ERR\\t%s\\t%d\\t%s' % (e.__class__.__name__, 0, m))\n";

struct SubprocOutcome {
  bool spawned = false;
  int exit_code = -1;
  std::string output;
};

SubprocOutcome run_subprocess(const std::string& exe, const std::string& input) {
  static std::once_flag sigpipe_once;
  std::call_once(sigpipe_once, [] { ::signal(SIGPIPE, SIG_IGN); });

  SubprocOutcome out;
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) return out;
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    return out;
  }
  pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    return out;
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(out_pipe[1], STDERR_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    ::execlp(exe.c_str(), exe.c_str(), "-c", kCheckerScript, static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);

  size_t written = 0;
  bool write_ok = true;
  while (written < input.size()) {
    ssize_t n = ::write(in_pipe[1], input.data() + written, input.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      write_ok = false;  // child died early; its output explains why
      break;
    }
    written += static_cast<size_t>(n);
  }
  ::close(in_pipe[1]);

  char buf[4096];
  while (true) {
    ssize_t n = ::read(out_pipe[0], buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (n == 0) break;
    out.output.append(buf, static_cast<size_t>(n));
  }
  ::close(out_pipe[0]);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  out.spawned = true;
  out.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  (void)write_ok;
  return out;
}

std::vector<std::string> split_tabs(const std::string& s) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t tab = s.find('\t', start);
    if (tab == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, tab - start));
    start = tab + 1;
  }
}

}  // namespace

std::string normalize_error_type(const std::string& py_class, const std::string& message) {
  if (py_class == "TabError") return "TabError";
  if (py_class == "IndentationError") {
    const std::string low = to_lower(message);
    if (low.find("unexpected indent") != std::string::npos) return "UnexpectedIndent";
    if (low.find("unindent") != std::string::npos || low.find("dedent") != std::string::npos)
      return "UnexpectedDedent";
    return "Other";
  }
  if (py_class == "SyntaxError") return "InvalidSyntax";
  return "Other";
}

struct SyntaxChecker::Pool {
  explicit Pool(int size) : sem(std::max(1, std::min(size, 64))) {}
  std::counting_semaphore<64> sem;
};

SyntaxChecker::SyntaxChecker() : SyntaxChecker(SyntaxOracleConfig{}) {}

SyntaxChecker::SyntaxChecker(SyntaxOracleConfig cfg)
    : cfg_(std::move(cfg)), pool_(std::make_shared<Pool>(cfg_.pool_size)) {}

SyntaxCheckResult SyntaxChecker::check(const SourceProgram& p) const {
  if (cfg_.backend == OracleBackend::Embedded) return embedded_check(p);

  const std::string& exe =
      p.version == PyVersion::Py2 ? cfg_.py2_interpreter : cfg_.py3_interpreter;
  if (exe.empty())
    throw OracleUnavailable("no interpreter configured for Python " +
                            std::to_string(version_number(p.version)));

  pool_->sem.acquire();
  SubprocOutcome out;
  try {
    out = run_subprocess(exe, p.text);
  } catch (...) {
    pool_->sem.release();
    throw;
  }
  pool_->sem.release();

  if (!out.spawned || out.exit_code == 127)
    throw OracleUnavailable("cannot run interpreter '" + exe + "'");
  if (out.output.rfind("OK", 0) == 0) {
    SyntaxCheckResult r;
    r.ok = true;
    return r;
  }
  if (out.output.rfind("ERR\t", 0) == 0) {
    std::vector<std::string> parts = split_tabs(out.output.substr(4));
    if (parts.size() >= 3) {
      int line = std::atoi(parts[1].c_str());
      return failure_result(parts[0], parts[2], line);
    }
  }
  throw OracleUnavailable("unexpected interpreter output from '" + exe + "'");
}

SyntaxCheckResult check_syntax(const SourceProgram& p) { return embedded_check(p); }

const SyntaxChecker& default_syntax_checker() {
  static const SyntaxChecker checker;
  return checker;
}

std::string normalized_ast(const SourceProgram& p) {
  parse::ParseOutcome out = parse::parse_module(p.text, p.version);
  if (out.error)
    throw ParseFailure(format_message(out.error->py_class, out.error->message,
                                      out.error->line));
  return ast::serialize(out.module);
}

bool ast_equal(const SourceProgram& a, const SourceProgram& b) {
  return normalized_ast(a) == normalized_ast(b);
}

}  // namespace pyfix
