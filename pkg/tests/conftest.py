def pytest_addoption(parser):
    parser.addoption(
        "--run-s5",
        action="store_true",
        default=False,
        help="enable the long-running symmetric-group-on-5-points restriction check",
    )
