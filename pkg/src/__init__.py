"""GSVD precoding toolkit for integrated multicast and confidential service."""
