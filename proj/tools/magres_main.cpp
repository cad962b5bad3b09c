#include "magres/cli.hpp"

int main(int argc, char** argv) {
    return magres::cli::dispatch(argc, argv);
}
