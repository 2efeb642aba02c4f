#pragma once

#include <string>

namespace pyfix {

/// Version of the object-language grammar a program is written against.
enum class PyVersion { Py2, Py3 };

inline int version_number(PyVersion v) { return v == PyVersion::Py2 ? 2 : 3; }

PyVersion version_from_number(int n);

/// A unit of object-language (Python) source under analysis. `text` is the
/// exact byte content; `id` identifies the program within a dataset.
struct SourceProgram {
  std::string id;
  std::string text;
  PyVersion version = PyVersion::Py3;
};

}  // namespace pyfix
