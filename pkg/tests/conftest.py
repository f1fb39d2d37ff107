import pytest

from ddosdetect.flow_data import parse_flow_csv

SAMPLE_CSV = b"""Destination,Flow Duration,Total Fwd Pkts,Total Bwd Pkts,Total Length of Fwd Pkts,Total Length of Bwd Pkts,Initial Window bytes Fwd,Initial Window bytes Bwd,Label
53,83718,4,2,184,300,-1,-1,BENIGN
445,10706606,29,24,8142,4220,8192,2050,BENIGN
80,39723,3,5,26,11601,8192,229,DDoS
443,118945,19,25,1169,43577,29200,61,BENIGN
80,80803000,9,6,62,11607,256,229,DDoS
"""

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def sample_bytes():
    return SAMPLE_CSV


@pytest.fixture
def sample_flows(sample_bytes):
    return parse_flow_csv(sample_bytes, source_name="sample_flows")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
