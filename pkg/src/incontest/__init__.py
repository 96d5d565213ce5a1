"""Incontestability toolkit for school-choice assignments."""
