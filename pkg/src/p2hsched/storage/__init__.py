"""
Storage Layer.

Run-directory persistence for scheduling artefacts: JSON documents and CSV
tables written atomically and tracked in a checksum manifest.
"""
