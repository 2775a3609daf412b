"""Uniformization toolkit: Fuchsian data, connections and derived ODEs."""
