from __future__ import annotations

import pytest

from semannot.fixtures import case_study_dir
from semannot.project import Project, ProjectConfig


@pytest.fixture
def case_dir():
    return case_study_dir()


@pytest.fixture
def project(case_dir) -> Project:
    return Project.load(ProjectConfig.from_file(case_dir / "project.json"))


@pytest.fixture
def perturbed_project(case_dir) -> Project:
    return Project.load(ProjectConfig.from_file(case_dir / "project_perturbed.json"))


@pytest.fixture
def knowledge(project):
    return project.knowledge


@pytest.fixture
def model(project):
    return project.model


@pytest.fixture
def rules(project):
    return project.rules


@pytest.fixture
def store(project):
    return project.store
