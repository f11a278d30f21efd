#include "cpf/log.hpp"

#include <iostream>
#include <mutex>

namespace cpf {

namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

WarningSink& current_sink() {
    static WarningSink sink = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
    return sink;
}

}  // namespace

WarningSink set_warning_sink(WarningSink sink) {
    std::lock_guard<std::mutex> lock(sink_mutex());
    WarningSink old = current_sink();
    current_sink() = std::move(sink);
    return old;
}

void warn(const std::string& message) {
    std::lock_guard<std::mutex> lock(sink_mutex());
    if (current_sink()) current_sink()(message);
}

}  // namespace cpf
