#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace pseudotor {

/// Minimal streaming JSON writer with deterministic output: keys appear in
/// insertion order and every floating value is printed with 17 significant
/// digits, so identical runs produce byte-identical files.
class JsonWriter {
  public:
    JsonWriter() { out_.setf(std::ios::boolalpha); }

    JsonWriter& begin_object() { return open('{'); }
    JsonWriter& end_object() { return close('}'); }
    JsonWriter& begin_array() { return open('['); }
    JsonWriter& end_array() { return close(']'); }

    JsonWriter& key(const std::string& k) {
        comma();
        out_ << '"' << escape(k) << "\":";
        fresh_ = true;
        return *this;
    }

    JsonWriter& value(double v) {
        comma();
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out_ << buf;
        return *this;
    }
    JsonWriter& value(int v) { comma(); out_ << v; return *this; }
    JsonWriter& value(long v) { comma(); out_ << v; return *this; }
    JsonWriter& value(std::size_t v) { comma(); out_ << v; return *this; }
    JsonWriter& value(bool v) { comma(); out_ << (v ? "true" : "false"); return *this; }
    JsonWriter& value(const std::string& v) {
        comma();
        out_ << '"' << escape(v) << '"';
        return *this;
    }
    JsonWriter& value(const char* v) { return value(std::string(v)); }

    std::string str() const { return out_.str(); }

  private:
    JsonWriter& open(char c) {
        comma();
        out_ << c;
        fresh_ = true;
        return *this;
    }
    JsonWriter& close(char c) {
        out_ << c;
        fresh_ = false;
        return *this;
    }
    void comma() {
        if (!fresh_) out_ << ',';
        fresh_ = false;
    }
    static std::string escape(const std::string& s) {
        std::string r;
        for (char c : s) {
            if (c == '"' || c == '\\') r += '\\';
            r += c;
        }
        return r;
    }

    std::ostringstream out_;
    bool fresh_ = true;
};

}  // namespace pseudotor
